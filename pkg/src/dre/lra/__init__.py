"""Exact linear real arithmetic: formulas, simplex-based decisions, Fourier-Motzkin."""
from .fm import eliminate_exists
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Formula,
    MissingBinding,
    Not,
    Or,
    atom,
    atoms,
    conj,
    disj,
    eq,
    evaluate,
    free_vars,
    ge,
    gt,
    implies,
    le,
    lt,
    neg,
    nnf,
    size,
    substitute,
)
from .simplex import ResourceLimit
from .smtlib import SmtLibError, SubprocessSolver
from .solver import Prepared, SatResult, SolverError, is_sat, is_valid

__all__ = [
    "FALSE", "TRUE", "And", "Atom", "Const", "Formula", "MissingBinding", "Not", "Or",
    "atom", "atoms", "conj", "disj", "eq", "evaluate", "free_vars", "ge", "gt", "implies",
    "le", "lt", "neg", "nnf", "size", "substitute", "eliminate_exists", "ResourceLimit",
    "SmtLibError", "SubprocessSolver", "Prepared", "SatResult", "SolverError", "is_sat", "is_valid",
]
