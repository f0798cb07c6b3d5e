"""Acceptance run: one PASS/FAIL line per criterion.

The lines are printed in pytest's terminal summary (see conftest.py) and
when this file is run directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from oracles import maximal, rectangle_sound  # noqa: E402

from dre import data  # noqa: E402
from dre.data import fixture  # noqa: E402
from dre.dispatch import CampaignConfig, simulate_campaign  # noqa: E402
from dre.encoder import encode  # noqa: E402
from dre.irr import convergence, run_irr  # noqa: E402
from dre.lra import conj, eliminate_exists, evaluate, free_vars, is_sat, substitute  # noqa: E402
from dre.lra.formula import atom  # noqa: E402
from dre.model.expr import LinearExpression  # noqa: E402

FIXTURES = ("unit", "twoact", "delivery_s", "delivery_s_battery")
RESULTS: list = []
_RUNS: dict = {}


def report(number, ok, text):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
    RESULTS.append(line)
    print(line)
    return ok


def irr_runs():
    if not _RUNS:
        for n in FIXTURES:
            enc = encode(*fixture(n))
            _RUNS[n] = (enc, run_irr(enc, beta=1))
    return _RUNS


def test_criterion_1_oracle_soundness():
    t = time.perf_counter()
    rng = random.Random(1)
    bad, rects = [], 0
    for name, (enc, res) in irr_runs().items():
        for R in res.accepted:
            rects += 1
            if not rectangle_sound(enc, R, 100, rng):
                bad.append((name, str(R)))
    secs = time.perf_counter() - t
    ok = not bad and secs < 60
    report(1, ok, f"{rects} accepted rectangles x 100 samples, {len(bad)} unsound, {secs:.1f} s")
    assert ok, bad[:3]


def test_criterion_2_two_beta_maximality():
    t = time.perf_counter()
    failures = {n: maximal(enc, res.dre, Fraction(1)) for n, (enc, res) in irr_runs().items()}
    secs = time.perf_counter() - t
    ok = not any(failures.values()) and secs < 30
    report(2, ok, f"every unblocked 2-beta extension rejected on {len(failures)} fixtures, "
                  f"{secs:.1f} s" if ok else f"extensions accepted: {failures}")
    assert ok


def _random_cube(rng):
    elim = [f"e{i}" for i in range(rng.randint(1, 3))]
    kept = [f"k{i}" for i in range(rng.randint(1, 2))]
    cube = []
    for _ in range(rng.randint(1, 10)):
        coeffs = {v: rng.randint(-5, 5) for v in elim + kept if rng.random() < 0.6}
        cube.append(atom(LinearExpression.build(rng.randint(-5, 5), coeffs),
                         rng.choice(("<=", "<", "="))))
    return conj(*cube), elim, kept


def test_criterion_3_qe_correctness():
    t = time.perf_counter()
    rng = random.Random(2024)
    axis = [Fraction(i, 2) - 5 for i in range(21)]
    mismatches, points = [], 0
    for _ in range(500):
        f, elim, kept = _random_cube(rng)
        out = eliminate_exists(set(elim), f)
        if free_vars(out) - set(kept):
            mismatches.append((str(f), "eliminated variable left over"))
            continue
        for pt in itertools.product(axis, repeat=len(kept)):
            v = dict(zip(kept, pt))
            points += 1
            if evaluate(substitute(out, v), {}) != is_sat(substitute(f, v)).sat:
                mismatches.append((str(f), v))
    secs = time.perf_counter() - t
    ok = not mismatches and secs < 120
    report(3, ok, f"500 formulas, {points} grid points, {len(mismatches)} disagreements, {secs:.1f} s")
    assert ok, mismatches[:3]


def test_criterion_4_convergence_shape():
    problems, soft = [], []
    for name, (_, res) in irr_runs().items():
        conv = convergence(res.snapshots)
        pcts = [p for _, p in conv]
        if pcts != sorted(pcts) or pcts[-1] != 100:
            problems.append(f"{name}: not nondecreasing to 100")
        fw = res.first_widening_step
        if fw is None or fw > conv[-1][0]:
            problems.append(f"{name}: first widening missing or after completion")
        at50 = max((p for s, p in conv if s <= 50), default=Fraction(0))
        soft.append(f"{name} {float(at50):.0f}%")
    ok = not problems
    report(4, ok, "convergence nondecreasing to 100%, first widening before completion; "
                  f"coverage within 50 steps (soft, not asserted): {', '.join(soft)}"
           if ok else "; ".join(problems))
    assert ok


def _campaign(name):
    cfg = CampaignConfig.load(data.campaign_path(name))
    t = time.perf_counter()
    res = simulate_campaign(cfg)
    return cfg, res, time.perf_counter() - t


def _summary(res, policies):
    return ", ".join(f"{p} {res.coverage(p):.0f}%" for p in policies)


@pytest.mark.slow
def test_criterion_5_duration_campaign():
    cfg, res, secs = _campaign("delivery-s")
    n = len(res.episodes) // len(cfg.policies)
    cov = {p: res.coverage(p) for p in cfg.policies}
    avg = res.avg_replans("DREEx")
    guarantee = all(e.guarantee_ok for e in res.episodes)
    ok = (n == 100 and cfg.seed == 42 and cov["DREEx"] > cov["Bl-60"] > cov["Bl-0"]
          and cov["Bl-0"] <= 5 and avg is not None and avg <= 0.5 and guarantee and secs < 300)
    report(5, ok, f"{n} episodes: {_summary(res, ['DREEx', 'Bl-60', 'Bl-0'])}, "
                  f"DREEx avg replans {avg}, guarantee {'held' if guarantee else 'BROKEN'}, "
                  f"{secs:.0f} s")
    assert ok, res.table()


@pytest.mark.slow
def test_criterion_6_resource_campaign():
    cfg, res, secs = _campaign("delivery-s-battery")
    baselines = [p for p in cfg.policies if p.startswith("Bl-")]
    baselines.sort(key=lambda p: int(p[3:]))
    covs = [res.coverage(p) for p in baselines]
    monotone = all(a <= b for a, b in zip(covs, covs[1:]))
    ok = res.coverage("DREEx") >= 95 and monotone and cfg.seed == 42 and secs < 300
    report(6, ok, f"DREEx {res.coverage('DREEx'):.0f}%, baselines "
                  f"{' <= '.join(f'{c:.0f}' for c in covs)} ({'monotone' if monotone else 'NOT monotone'}), "
                  f"{secs:.0f} s")
    assert ok, res.table()


def test_criterion_7_reference_scale_not_reproduced():
    # Reference figures are reported next to ours, never asserted.
    report(7, True, "full-scale timings and exact table percentages are out of scope; "
                    "reference values (DREEx 92.2%/0.1 replans, battery 99.2%) are reported only")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
