"""Satisfiability and validity for quantifier-free linear real arithmetic.

The formula is put in negation normal form, top-level equalities are solved
away, and the remaining and/or tree is explored depth first: every branch is a
conjunction of atoms checked incrementally by the exact simplex in
:mod:`dre.lra.simplex`.  This enumerates the DNF lazily, sharing all the work
done for a common prefix of conjuncts.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import NamedTuple

from ..model.expr import LinearExpression
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Formula,
    Or,
    atoms,
    conj,
    evaluate,
    free_vars,
    neg,
    nnf,
    substitute,
)
from .simplex import ResourceLimit, Simplex

DEFAULT_BUDGET = 200_000


class SatResult(NamedTuple):
    sat: bool
    model: dict | None = None


class SolverError(RuntimeError):
    """Internal inconsistency, e.g. a witness that fails evaluation."""


def _conjuncts(f: Formula):
    return list(f.args) if isinstance(f, And) else [f]


def solve_equalities(f: Formula):
    """Eliminate top-level equalities of an NNF formula.

    Returns ``(rest, defs)`` where ``defs`` maps eliminated variables to
    expressions over the remaining ones and ``rest`` is the residual formula
    (possibly a constant).  ``f`` is equivalent to ``rest`` conjoined with the
    definitions.
    """
    parts = _conjuncts(f)
    eqs = [p for p in parts if isinstance(p, Atom) and p.rel == "="]
    # a <= 0 together with -a <= 0 is an equality too (STN duration pins look like this)
    weak = {p.lhs: p for p in parts if isinstance(p, Atom) and p.rel == "<="}
    paired = set()
    for lhs, p in weak.items():
        q = weak.get(-lhs)
        if q is not None and p not in paired and lhs.terms:
            paired.update((p, q))
            eqs.append(Atom(lhs, "="))
    if not eqs:
        return f, {}
    occ: Counter = Counter()
    for a in atoms(f):
        for v, _ in a.lhs.terms:
            occ[v] += 1
    defs: dict = {}
    for e in eqs:
        lhs = e.lhs.substitute(defs) if defs else e.lhs
        if lhs.is_constant():
            if lhs.constant != 0:
                return FALSE, defs
            continue
        var = min((v for v, _ in lhs.terms), key=lambda v: (occ[v], v))
        c = lhs.coef(var)
        # var = -(lhs - c*var) / c
        expr = (lhs - LinearExpression.var(var, c)) * (Fraction(-1) / c)
        binding = {var: expr}
        for k in defs:
            if defs[k].coef(var):
                defs[k] = defs[k].substitute(binding)
        defs[var] = expr
    rest = conj(*[p for p in parts
                  if not (isinstance(p, Atom) and p.rel == "=") and p not in paired])
    if defs:
        rest = substitute(rest, defs)
    return rest, defs


class _Search:
    def __init__(self, budget):
        self.sx = Simplex(max_pivots=budget)
        self.var_id: dict = {}
        self.row_id: dict = {}
        self.bounds: dict = {}
        self.nodes = 0
        self.budget = budget

    def _var(self, name):
        i = self.var_id.get(name)
        if i is None:
            i = self.sx.new_var()
            self.var_id[name] = i
        return i

    def _bounds(self, a: Atom):
        """(simplex var, lower-or-None, upper-or-None) for an atom."""
        r = self.bounds.get(a)
        if r is not None:
            return r
        c0 = a.lhs.terms[0][1]
        # divide through by the leading coefficient: form has leading coefficient 1
        terms = tuple((v, c / c0) for v, c in a.lhs.terms)
        flip = c0 < 0
        if len(terms) == 1:
            x = self._var(terms[0][0])
        else:
            x = self.row_id.get(terms)
            if x is None:
                x = self.sx.add_row({self._var(v): c for v, c in terms})
                self.row_id[terms] = x
        k = -a.lhs.constant / c0
        strict = Fraction(-1) if a.rel == "<" else Fraction(0)
        if not flip:
            # form <= k  (or < k)
            lo = (k, Fraction(0)) if a.rel == "=" else None
            hi = (k, strict)
        else:
            # form >= k  (or > k)
            lo = (k, -strict)
            hi = (k, Fraction(0)) if a.rel == "=" else None
        r = (x, lo, hi)
        self.bounds[a] = r
        return r

    def _assert(self, a: Atom) -> bool:
        x, lo, hi = self._bounds(a)
        if lo is not None and not self.sx.assert_lower(x, lo):
            return False
        if hi is not None and not self.sx.assert_upper(x, hi):
            return False
        return True

    def run(self, pending: list, ors: list) -> bool:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise ResourceLimit("search node budget exhausted")
        ors = list(ors)
        stack = list(pending)
        while stack:
            g = stack.pop()
            if isinstance(g, Atom):
                if not self._assert(g):
                    return False
            elif isinstance(g, And):
                stack.extend(g.args)
            elif isinstance(g, Or):
                ors.append(g)
            elif isinstance(g, Const):
                if not g.value:
                    return False
            else:
                raise TypeError(f"formula not in NNF: {g!r}")
        if not self.sx.check():
            return False
        if not ors:
            return True
        i = min(range(len(ors)), key=lambda j: len(ors[j].args))
        branch = ors[i]
        rest = ors[:i] + ors[i + 1:]
        # atoms first: they are cheap to refute
        children = sorted(branch.args, key=lambda c: not isinstance(c, Atom))
        for child in children:
            mark = self.sx.mark()
            if self.run([child], rest):
                return True
            self.sx.backtrack(mark)
        return False

    def model(self) -> dict:
        delta = self.sx.concrete_delta() / 2
        return {name: self.sx.concrete(i, delta) for name, i in self.var_id.items()}


def is_sat(f: Formula, budget: int | None = DEFAULT_BUDGET, backend=None) -> SatResult:
    """Decide ``f``; on sat the returned model is total over ``free_vars(f)``.

    ``budget`` bounds search nodes and simplex pivots separately; running out
    raises :class:`ResourceLimit` rather than guessing.  ``backend``, when
    given, is an external solver object (see :mod:`dre.lra.smtlib`) whose
    sat answers are cross-checked against their witness.
    """
    if backend is not None:
        res = backend.check(f)
        if res.sat and not evaluate(f, _total(res.model, f)):
            raise SolverError("external solver returned a model that does not satisfy the formula")
        return SatResult(res.sat, _total(res.model, f) if res.sat else None)

    return Prepared(f).check(budget=budget)


class Prepared:
    """A formula with its equalities solved once, to be checked under extra conjuncts.

    ``Prepared(f).check(extra)`` decides ``f & extra``; repeated queries with
    different ``extra`` parts (bounds on a few variables, typically) share the
    preprocessing of ``f``.
    """

    def __init__(self, f: Formula):
        self.formula = f
        g = nnf(f)
        self.rest, self.defs = (FALSE, {}) if g == FALSE else solve_equalities(g)

    def check(self, extra: Formula = TRUE, budget: int | None = DEFAULT_BUDGET) -> SatResult:
        if self.rest == FALSE:
            return SatResult(False)
        more = nnf(extra)
        if self.defs and more != TRUE:
            more = substitute(more, self.defs)
        # variables pinned to constants by ``extra`` are folded in before searching
        pinned = {}
        for a in _conjuncts(more):
            if isinstance(a, Atom) and a.rel == "=" and len(a.lhs.terms) == 1:
                v, c = a.lhs.terms[0]
                val = -a.lhs.constant / c
                if pinned.setdefault(v, val) != val:
                    return SatResult(False)
        if pinned:
            goal = conj(substitute(self.rest, pinned), substitute(more, pinned))
        else:
            goal = conj(self.rest, more)
        if goal == FALSE:
            return SatResult(False)
        search = _Search(budget)
        if goal != TRUE and not search.run([goal], []):
            return SatResult(False)
        model = search.model()
        model.update(pinned)
        for v in free_vars(goal):
            model.setdefault(v, Fraction(0))
        for e in self.defs.values():
            for v in e.variables:
                model.setdefault(v, Fraction(0))
        for v, e in self.defs.items():
            model[v] = e.evaluate(model)
        whole = conj(self.formula, extra)
        model = _total(model, whole)
        if not evaluate(whole, model):
            raise SolverError("extracted model does not satisfy the formula")
        return SatResult(True, model)


def _total(model, f) -> dict:
    out = dict(model or {})
    for v in free_vars(f):
        out.setdefault(v, Fraction(0))
    return out


def is_valid(f: Formula, budget: int | None = DEFAULT_BUDGET, backend=None) -> bool:
    return not is_sat(neg(f), budget, backend).sat


__all__ = ["Prepared", "SatResult", "SolverError", "ResourceLimit", "is_sat", "is_valid", "solve_equalities",
           "DEFAULT_BUDGET"]
