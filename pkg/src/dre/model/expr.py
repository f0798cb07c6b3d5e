"""Exact linear expressions and conditions over named symbols.

Everything here uses :class:`fractions.Fraction`; floats are rejected at the
boundary so nothing inexact leaks into the engine.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\.(\d+))?(?:\s*/\s*([+-]?\d+))?\s*$")


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions and rational strings ("3", "-1/2", "0.25")."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise ValueError(f"not a rational literal: {value!r}")
        whole, frac, den = m.groups()
        if frac is not None and den is not None:
            raise ValueError(f"not a rational literal: {value!r}")
        if frac is not None:
            return Fraction(f"{whole}.{frac}")
        q = Fraction(int(whole))
        if den is not None:
            if int(den) == 0:
                raise ValueError(f"zero denominator in {value!r}")
            q /= int(den)
        return q
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_fraction(q: Fraction) -> str:
    q = to_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class LinearExpression:
    """``constant + sum(coef * symbol)`` with exact coefficients.

    ``terms`` is kept sorted by symbol name with zero coefficients dropped, so
    structural equality is semantic equality.
    """

    constant: Fraction = Fraction(0)
    terms: tuple = ()

    @staticmethod
    def build(constant: Number = 0, coeffs: Mapping[str, Number] | None = None) -> "LinearExpression":
        items = []
        if coeffs:
            for name, c in coeffs.items():
                c = to_fraction(c)
                if c:
                    items.append((name, c))
        items.sort()
        return LinearExpression(to_fraction(constant), tuple(items))

    @staticmethod
    def const(value: Number) -> "LinearExpression":
        return LinearExpression(to_fraction(value), ())

    @staticmethod
    def var(name: str, coef: Number = 1) -> "LinearExpression":
        return LinearExpression.build(0, {name: coef})

    def coeffs(self) -> dict:
        return dict(self.terms)

    def coef(self, name: str) -> Fraction:
        for n, c in self.terms:
            if n == name:
                return c
        return Fraction(0)

    @property
    def variables(self) -> frozenset:
        return frozenset(n for n, _ in self.terms)

    def is_constant(self) -> bool:
        return not self.terms

    def __add__(self, other) -> "LinearExpression":
        other = _lift(other)
        acc = dict(self.terms)
        for n, c in other.terms:
            acc[n] = acc.get(n, 0) + c
        return LinearExpression.build(self.constant + other.constant, acc)

    __radd__ = __add__

    def __neg__(self) -> "LinearExpression":
        return LinearExpression(-self.constant, tuple((n, -c) for n, c in self.terms))

    def __sub__(self, other) -> "LinearExpression":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "LinearExpression":
        return _lift(other) - self

    def __mul__(self, k) -> "LinearExpression":
        if isinstance(k, LinearExpression):
            if k.is_constant():
                k = k.constant
            elif self.is_constant():
                return k * self.constant
            else:
                raise ValueError("product of two non-constant expressions is not linear")
        k = to_fraction(k)
        if not k:
            return LinearExpression()
        return LinearExpression(self.constant * k, tuple((n, c * k) for n, c in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, k) -> "LinearExpression":
        return self * (1 / to_fraction(k))

    def substitute(self, bindings: Mapping[str, object]) -> "LinearExpression":
        """Simultaneous substitution; bound values may be numbers or expressions."""
        if not any(n in bindings for n, _ in self.terms):
            return self
        const = self.constant
        acc: dict = {}
        for n, c in self.terms:
            if n in bindings:
                val = bindings[n]
                if isinstance(val, LinearExpression):
                    const += c * val.constant
                    for m, d in val.terms:
                        acc[m] = acc.get(m, 0) + c * d
                else:
                    const += c * to_fraction(val)
            else:
                acc[n] = acc.get(n, 0) + c
        return LinearExpression.build(const, acc)

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        total = self.constant
        for n, c in self.terms:
            total += c * to_fraction(values[n])
        return total

    def rename(self, mapping: Mapping[str, str]) -> "LinearExpression":
        return LinearExpression.build(
            self.constant, _merge((mapping.get(n, n), c) for n, c in self.terms)
        )

    def __str__(self) -> str:
        parts = []
        for n, c in self.terms:
            if c == 1:
                body = n
            elif c == -1:
                body = f"-{n}"
            else:
                body = f"{_fmt_coef(c)}*{n}"
            parts.append(body)
        if self.constant or not parts:
            parts.append(_fmt_coef(self.constant))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


def _fmt_coef(c: Fraction) -> str:
    s = format_fraction(c)
    if "/" in s:
        return f"({s})"
    return s


def _merge(items: Iterable) -> dict:
    acc: dict = {}
    for n, c in items:
        acc[n] = acc.get(n, 0) + c
    return acc


def _lift(x) -> LinearExpression:
    if isinstance(x, LinearExpression):
        return x
    return LinearExpression.const(to_fraction(x))


RELATIONS = ("<=", "<", "=", ">=", ">")


@dataclass(frozen=True)
class Condition:
    """``expr <op> 0``.  Stored normalized so that printing and re-parsing is exact."""

    expr: LinearExpression
    op: str

    def __post_init__(self):
        if self.op not in RELATIONS:
            raise ValueError(f"unknown relation {self.op!r}")

    @staticmethod
    def compare(lhs, op: str, rhs) -> "Condition":
        return Condition(_lift(lhs) - _lift(rhs), op)

    @property
    def variables(self) -> frozenset:
        return self.expr.variables

    def holds(self, values: Mapping[str, object]) -> bool:
        return check_relation(self.expr.evaluate(values), self.op)

    def substitute(self, bindings: Mapping[str, object]) -> "Condition":
        return Condition(self.expr.substitute(bindings), self.op)

    def __str__(self) -> str:
        return f"{self.expr} {self.op} 0"


def check_relation(value: Fraction, op: str) -> bool:
    if op == "<=":
        return value <= 0
    if op == "<":
        return value < 0
    if op == "=":
        return value == 0
    if op == ">=":
        return value >= 0
    if op == ">":
        return value > 0
    raise ValueError(op)
