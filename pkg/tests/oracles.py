"""Independent checks used by the IRR tests and the acceptance run."""
from __future__ import annotations

import random
from fractions import Fraction

from dre.irr import UB, EnvelopeChecker
from dre.lra import Prepared, conj, eq
from dre.model import validate_concrete

_PREPARED: dict = {}


def sample_point(R, rng: random.Random, resolution: int = 1000) -> dict:
    return {n: lo + (hi - lo) * Fraction(rng.randint(0, resolution), resolution)
            for n, lo, hi in R.bounds}


def valuation_ok(enc, valuation) -> bool:
    """The concrete oracle accepts a schedule extracted from a solver witness."""
    prep = _PREPARED.get(id(enc))
    if prep is None or prep[0] is not enc:
        prep = _PREPARED[id(enc)] = (enc, Prepared(conj(enc.enc_tn, enc.enc_eff, enc.enc_proofs)))
    res = prep[1].check(conj(*(eq(n, v) for n, v in valuation.items())))
    if not res.sat:
        return False
    return validate_concrete(enc.problem, enc.plan, valuation, enc.schedule(res.model))


def rectangle_sound(enc, R, samples: int, rng: random.Random) -> bool:
    corners = [{n: (hi if k else lo) for n, lo, hi in R.bounds} for k in (0, 1)]
    points = corners + [sample_point(R, rng) for _ in range(samples)]
    return all(valuation_ok(enc, v) for v in points)


def extensions(R, beta):
    """Every single-bound 2*beta outward extension not blocked by the zero clamp."""
    for n, lo, hi in R.bounds:
        yield n, UB, R.replace(n, lo, hi + 2 * beta)
        if lo > 0:
            yield n, "LB", R.replace(n, max(lo - 2 * beta, Fraction(0)), hi)


def maximal(enc, R, beta) -> list:
    """Extensions that unexpectedly pass the envelope check (empty when 2beta-maximal)."""
    check = EnvelopeChecker(enc)
    return [(n, d) for n, d, ext in extensions(R, beta) if check(ext)]
