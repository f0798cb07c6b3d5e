"""Quantifier-free formulas over linear atoms with rational coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping

from ..model.expr import LinearExpression, to_fraction


class MissingBinding(KeyError):
    pass


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Atom(Formula):
    """``lhs rel 0`` with rel in ``<=``, ``<``, ``=``.

    Built through :func:`atom`, which folds constants, scales variable
    coefficients to coprime integers and fixes the sign of equalities.
    """

    lhs: LinearExpression
    rel: str

    def __str__(self):
        return f"{self.lhs} {self.rel} 0"


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __str__(self):
        return "(" + " & ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __str__(self):
        return "(" + " | ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"!{self.arg}"


def _normalize(lhs: LinearExpression, rel: str) -> LinearExpression:
    den = 1
    for _, c in lhs.terms:
        den = _lcm(den, c.denominator)
    g = 0
    for _, c in lhs.terms:
        g = gcd(g, (c * den).numerator)
    scale = Fraction(den, g)
    if rel == "=" and lhs.terms[0][1] < 0:
        scale = -scale
    if scale == 1:
        return lhs
    return lhs * scale


def atom(lhs: LinearExpression, rel: str) -> Formula:
    """Normalized ``lhs rel 0``; rel may also be ``>=`` or ``>``."""
    if rel == ">=":
        lhs, rel = -lhs, "<="
    elif rel == ">":
        lhs, rel = -lhs, "<"
    if rel not in ("<=", "<", "="):
        raise ValueError(f"unknown relation {rel!r}")
    if lhs.is_constant():
        v = lhs.constant
        ok = v <= 0 if rel == "<=" else v < 0 if rel == "<" else v == 0
        return TRUE if ok else FALSE
    return Atom(_normalize(lhs, rel), rel)


def _lift(x) -> LinearExpression:
    if isinstance(x, LinearExpression):
        return x
    if isinstance(x, str):
        return LinearExpression.var(x)
    return LinearExpression.const(to_fraction(x))


def le(a, b) -> Formula:
    return atom(_lift(a) - _lift(b), "<=")


def lt(a, b) -> Formula:
    return atom(_lift(a) - _lift(b), "<")


def ge(a, b) -> Formula:
    return atom(_lift(b) - _lift(a), "<=")


def gt(a, b) -> Formula:
    return atom(_lift(b) - _lift(a), "<")


def eq(a, b) -> Formula:
    return atom(_lift(a) - _lift(b), "=")


def conj(*fs) -> Formula:
    out = []
    seen = set()
    for f in _flatten(fs, And):
        if f == FALSE:
            return FALSE
        if f == TRUE or f in seen:
            continue
        seen.add(f)
        out.append(f)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*fs) -> Formula:
    out = []
    seen = set()
    for f in _flatten(fs, Or):
        if f == TRUE:
            return TRUE
        if f == FALSE or f in seen:
            continue
        seen.add(f)
        out.append(f)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def _flatten(fs, kind):
    for f in fs:
        if isinstance(f, (list, tuple)):
            yield from _flatten(f, kind)
        elif isinstance(f, kind):
            yield from f.args
        else:
            yield f


def neg(f: Formula) -> Formula:
    if isinstance(f, Const):
        return FALSE if f.value else TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def negate_atom(a: Atom) -> Formula:
    if a.rel == "<=":
        return atom(-a.lhs, "<")
    if a.rel == "<":
        return atom(-a.lhs, "<=")
    return disj(atom(a.lhs, "<"), atom(-a.lhs, "<"))


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form: negations pushed into atoms, equalities split when negated."""
    if isinstance(f, Const):
        return neg(f) if negate else f
    if isinstance(f, Atom):
        return negate_atom(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.arg, not negate)
    if isinstance(f, And):
        parts = [nnf(a, negate) for a in f.args]
        return disj(*parts) if negate else conj(*parts)
    if isinstance(f, Or):
        parts = [nnf(a, negate) for a in f.args]
        return conj(*parts) if negate else disj(*parts)
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula):
    """All atoms of ``f`` (with repetition removed, order of first appearance)."""
    seen = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            seen.setdefault(g, None)
        elif isinstance(g, (And, Or)):
            stack.extend(reversed(g.args))
        elif isinstance(g, Not):
            stack.append(g.arg)
    return list(seen)


def free_vars(f: Formula) -> frozenset:
    out = set()
    for a in atoms(f):
        out |= a.lhs.variables
    return frozenset(out)


def substitute(f: Formula, bindings: Mapping[str, object], _memo=None) -> Formula:
    """Simultaneous substitution of variables by numbers or linear expressions."""
    memo = {} if _memo is None else _memo
    if isinstance(f, Const):
        return f
    if isinstance(f, Atom):
        r = memo.get(f)
        if r is None:
            r = atom(f.lhs.substitute(bindings), f.rel)
            memo[f] = r
        return r
    if isinstance(f, Not):
        return neg(substitute(f.arg, bindings, memo))
    if isinstance(f, And):
        return conj(*[substitute(a, bindings, memo) for a in f.args])
    if isinstance(f, Or):
        return disj(*[substitute(a, bindings, memo) for a in f.args])
    raise TypeError(f"not a formula: {f!r}")


def evaluate(f: Formula, model: Mapping[str, object]) -> bool:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        try:
            v = f.lhs.evaluate(model)
        except KeyError as exc:
            raise MissingBinding(exc.args[0]) from None
        return v <= 0 if f.rel == "<=" else v < 0 if f.rel == "<" else v == 0
    if isinstance(f, Not):
        return not evaluate(f.arg, model)
    if isinstance(f, And):
        return all(evaluate(a, model) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, model) for a in f.args)
    raise TypeError(f"not a formula: {f!r}")


def size(f: Formula) -> int:
    if isinstance(f, (And, Or)):
        return 1 + sum(size(a) for a in f.args)
    if isinstance(f, Not):
        return 1 + size(f.arg)
    return 1
