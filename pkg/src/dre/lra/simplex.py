"""Exact general simplex for bound-constrained feasibility.

This is the incremental tableau procedure used inside SMT solvers: every
linear form gets a slack variable defined by a tableau row, atoms become
bounds on variables, and ``check`` repairs bound violations with Bland's rule.
Strict bounds are handled symbolically: values are pairs ``(a, b)`` standing
for ``a + b*delta`` with ``delta`` an infinitesimal.
"""
from __future__ import annotations

from fractions import Fraction

ZERO = (Fraction(0), Fraction(0))


class ResourceLimit(Exception):
    """A configured search or pivot budget ran out; the answer is unknown."""


def _add(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _sub(x, y):
    return (x[0] - y[0], x[1] - y[1])


def _scale(k, x):
    return (k * x[0], k * x[1])


class Simplex:
    def __init__(self, max_pivots: int | None = None):
        self.n = 0
        self.rows: dict = {}  # basic -> {nonbasic: coef}
        self.cols: dict = {}  # nonbasic -> set of basics whose row mentions it
        self.value: list = []
        self.lower: list = []
        self.upper: list = []
        self.trail: list = []
        self.pivots = 0
        self.max_pivots = max_pivots

    # -- construction -----------------------------------------------------
    def new_var(self) -> int:
        i = self.n
        self.n += 1
        self.value.append(ZERO)
        self.lower.append(None)
        self.upper.append(None)
        self.cols[i] = set()
        return i

    def add_row(self, coeffs: dict) -> int:
        """New slack variable equal to ``sum(coef * var)`` over existing variables."""
        s = self.new_var()
        row: dict = {}
        for v, c in coeffs.items():
            if v in self.rows:
                for w, d in self.rows[v].items():
                    row[w] = row.get(w, 0) + c * d
            else:
                row[v] = row.get(v, 0) + c
        row = {w: c for w, c in row.items() if c}
        self.rows[s] = row
        for w in row:
            self.cols[w].add(s)
        del self.cols[s]
        val = ZERO
        for w, c in row.items():
            val = _add(val, _scale(c, self.value[w]))
        self.value[s] = val
        return s

    # -- bounds -------------------------------------------------------------
    def mark(self) -> int:
        return len(self.trail)

    def backtrack(self, mark: int) -> None:
        # values stay consistent with the tableau; only bounds are restored
        while len(self.trail) > mark:
            v, lo, hi = self.trail.pop()
            self.lower[v] = lo
            self.upper[v] = hi

    def assert_upper(self, v: int, c) -> bool:
        hi = self.upper[v]
        if hi is not None and c >= hi:
            return True
        lo = self.lower[v]
        if lo is not None and c < lo:
            return False
        self.trail.append((v, lo, hi))
        self.upper[v] = c
        if v not in self.rows and self.value[v] > c:
            self._update(v, c)
        return True

    def assert_lower(self, v: int, c) -> bool:
        lo = self.lower[v]
        if lo is not None and c <= lo:
            return True
        hi = self.upper[v]
        if hi is not None and c > hi:
            return False
        self.trail.append((v, lo, hi))
        self.lower[v] = c
        if v not in self.rows and self.value[v] < c:
            self._update(v, c)
        return True

    # -- core ---------------------------------------------------------------
    def _update(self, v: int, c) -> None:
        diff = _sub(c, self.value[v])
        for b in self.cols[v]:
            self.value[b] = _add(self.value[b], _scale(self.rows[b][v], diff))
        self.value[v] = c

    def _pivot(self, b: int, nb: int) -> None:
        row = self.rows.pop(b)
        a = row.pop(nb)
        for w in row:
            self.cols[w].discard(b)
        others = self.cols.pop(nb)
        others.discard(b)
        # nb = (b - sum_{w != nb} row[w] * w) / a
        inv = 1 / a
        new_row = {w: -c * inv for w, c in row.items()}
        new_row[b] = inv
        self.cols[b] = set()
        for other in others:
            orow = self.rows[other]
            k = orow.pop(nb)
            for w, c in new_row.items():
                nc = orow.get(w, 0) + k * c
                if nc:
                    if w not in orow:
                        self.cols[w].add(other)
                    orow[w] = nc
                elif w in orow:
                    del orow[w]
                    self.cols[w].discard(other)
        self.rows[nb] = new_row
        for w in new_row:
            self.cols[w].add(nb)

    def _pivot_and_update(self, b: int, nb: int, target) -> None:
        a = self.rows[b][nb]
        theta = _scale(1 / a, _sub(target, self.value[b]))
        self.value[b] = target
        self.value[nb] = _add(self.value[nb], theta)
        for other in self.cols[nb]:
            if other != b:
                self.value[other] = _add(self.value[other], _scale(self.rows[other][nb], theta))
        self._pivot(b, nb)

    def check(self) -> bool:
        while True:
            bad = None
            for b in sorted(self.rows):
                val = self.value[b]
                lo, hi = self.lower[b], self.upper[b]
                if lo is not None and val < lo:
                    bad, target, up = b, lo, True
                    break
                if hi is not None and val > hi:
                    bad, target, up = b, hi, False
                    break
            if bad is None:
                return True
            self.pivots += 1
            if self.max_pivots is not None and self.pivots > self.max_pivots:
                raise ResourceLimit("simplex pivot budget exhausted")
            row = self.rows[bad]
            chosen = None
            for nb in sorted(row):
                c = row[nb]
                val = self.value[nb]
                if up:
                    ok = (c > 0 and (self.upper[nb] is None or val < self.upper[nb])) or \
                         (c < 0 and (self.lower[nb] is None or val > self.lower[nb]))
                else:
                    ok = (c < 0 and (self.upper[nb] is None or val < self.upper[nb])) or \
                         (c > 0 and (self.lower[nb] is None or val > self.lower[nb]))
                if ok:
                    chosen = nb
                    break
            if chosen is None:
                return False
            self._pivot_and_update(bad, chosen, target)

    def concrete_delta(self) -> Fraction:
        """A positive rational small enough that every bound holds concretely."""
        delta = Fraction(1)
        for v in range(self.n):
            a, b = self.value[v]
            lo, hi = self.lower[v], self.upper[v]
            if lo is not None and lo[0] < a and lo[1] > b:
                delta = min(delta, (a - lo[0]) / (lo[1] - b))
            if hi is not None and a < hi[0] and b > hi[1]:
                delta = min(delta, (hi[0] - a) / (b - hi[1]))
        return delta

    def concrete(self, v: int, delta: Fraction) -> Fraction:
        a, b = self.value[v]
        return a + b * delta
