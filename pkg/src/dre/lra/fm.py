"""Existential quantifier elimination by Fourier-Motzkin.

Works cube by cube on the DNF of the input.  Equalities mentioning an
eliminated variable are solved and substituted first; the remaining
inequalities are combined pairwise, one variable at a time, picking the
variable that occurs least often.  Parallel constraints are merged so only the
tightest survives.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction

from ..model.expr import LinearExpression
from .formula import FALSE, TRUE, And, Atom, Const, Formula, Or, atom, conj, disj, free_vars, nnf
from .simplex import ResourceLimit

MAX_CUBES = 4096
MAX_ATOMS = 20_000


def dnf(f: Formula, max_cubes: int = MAX_CUBES) -> list:
    """Cubes (lists of atoms) of an NNF formula; ``[]`` means false."""
    if isinstance(f, Const):
        return [[]] if f.value else []
    if isinstance(f, Atom):
        return [[f]]
    if isinstance(f, Or):
        out = []
        for a in f.args:
            out.extend(dnf(a, max_cubes))
            if len(out) > max_cubes:
                raise ResourceLimit("DNF expansion exceeds the cube limit")
        return out
    if isinstance(f, And):
        out = [[]]
        for a in f.args:
            sub = dnf(a, max_cubes)
            out = [c + s for c in out for s in sub]
            if len(out) > max_cubes:
                raise ResourceLimit("DNF expansion exceeds the cube limit")
        return out
    raise TypeError(f"formula not in NNF: {f!r}")


def _tighten(cube):
    """Drop duplicate/parallel inequalities keeping the tightest; None if false."""
    best: dict = {}
    eqs = {}
    for a in cube:
        if a.rel == "=":
            eqs[a] = None
            continue
        key = a.lhs.terms
        cur = best.get(key)
        if cur is None:
            best[key] = a
            continue
        # same variable part: larger constant is tighter, strict wins ties
        if (a.lhs.constant, a.rel == "<") > (cur.lhs.constant, cur.rel == "<"):
            best[key] = a
    # opposite parallel pairs f + c1 <= 0 and -f + c2 <= 0 need c1 + c2 <= 0
    for key, a in best.items():
        opp = tuple((v, -c) for v, c in key)
        b = best.get(opp)
        if b is not None:
            s = a.lhs.constant + b.lhs.constant
            if s > 0 or (s == 0 and (a.rel == "<" or b.rel == "<")):
                return None
    return list(eqs) + list(best.values())


def _substitute_cube(cube, var, expr):
    out = []
    binding = {var: expr}
    for a in cube:
        if a.lhs.coef(var):
            b = atom(a.lhs.substitute(binding), a.rel)
            if b == FALSE:
                return None
            if b == TRUE:
                continue
            out.append(b)
        else:
            out.append(a)
    return out


def _eliminate_cube(cube, elim: set, max_atoms: int):
    cube = list(dict.fromkeys(cube))
    # equalities first
    while True:
        occ = Counter(v for a in cube for v, _ in a.lhs.terms if v in elim)
        pick = None
        for a in cube:
            if a.rel != "=":
                continue
            cands = [v for v, _ in a.lhs.terms if v in elim]
            if cands:
                v = min(cands, key=lambda x: (occ[x], x))
                pick = (a, v)
                break
        if pick is None:
            break
        a, v = pick
        c = a.lhs.coef(v)
        expr = (a.lhs - LinearExpression.var(v, c)) * (Fraction(-1) / c)
        cube = _substitute_cube([b for b in cube if b is not a], v, expr)
        if cube is None:
            return None

    cube = _tighten(cube)
    while cube is not None:
        occ = Counter(v for a in cube for v, _ in a.lhs.terms if v in elim)
        if not occ:
            return cube
        v = min(occ, key=lambda x: (occ[x], x))
        keep, ups, lows = [], [], []
        for a in cube:
            c = a.lhs.coef(v)
            if c > 0:
                ups.append(a)
            elif c < 0:
                lows.append(a)
            else:
                keep.append(a)
        if len(keep) + len(ups) * len(lows) > max_atoms:
            raise ResourceLimit("Fourier-Motzkin blow-up guard hit")
        for u in ups:
            cu = u.lhs.coef(v)
            for lo in lows:
                cl = -lo.lhs.coef(v)
                rel = "<" if (u.rel == "<" or lo.rel == "<") else "<="
                b = atom(u.lhs * cl + lo.lhs * cu, rel)
                if b == FALSE:
                    return None
                if b != TRUE:
                    keep.append(b)
        cube = _tighten(keep)
    return None


def eliminate_exists(variables, f: Formula, max_atoms: int = MAX_ATOMS,
                     max_cubes: int = MAX_CUBES) -> Formula:
    """Quantifier-free formula equivalent to ``exists variables. f``."""
    elim = set(variables) & free_vars(f)
    if not elim:
        return f
    out = []
    for cube in dnf(nnf(f), max_cubes):
        res = _eliminate_cube(cube, elim, max_atoms)
        if res is None:
            continue
        c = conj(*res)
        if c == TRUE:
            return TRUE
        out.append(c)
    return disj(*out) if out else FALSE


__all__ = ["eliminate_exists", "dnf", "MAX_ATOMS", "MAX_CUBES"]
