from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import maximal, rectangle_sound
from dre.data import fixture
from dre.encoder import encode
from dre.irr import (ACCEPTED, DONE, DRE, FIRST_WIDENING, LB, UB, EnvelopeChecker, IRRSnapshot,
                     IRRState, InvalidNominal, RoundRobin, check_in_envelope, convergence,
                     read_snapshots, run_irr, write_snapshots)
from dre.lra import ResourceLimit
from dre.model import parametrize, parse_problem, parse_tt_plan

EPS = Fraction(1, 1000)
FIXTURES = ("unit", "twoact", "delivery_s", "delivery_s_battery")


@pytest.fixture(scope="module")
def runs(encodings):
    return {n: run_irr(encodings[n]) for n in FIXTURES}


def rect(**bounds):
    return DRE(tuple((n, Fraction(lo), Fraction(hi)) for n, (lo, hi) in bounds.items()))


def test_check_in_envelope_unit(encodings):
    enc = encodings["unit"]
    assert check_in_envelope(rect(g=(10, 10)), enc)
    assert check_in_envelope(rect(g=(EPS, 20)), enc)
    assert not check_in_envelope(rect(g=(0, 20 - EPS)), enc)  # g = 0 breaks the epsilon chain
    assert not check_in_envelope(rect(g=(0, 21)), enc)
    assert not check_in_envelope(rect(g=(EPS, 21)), enc)


def test_counterexample(encodings):
    check = EnvelopeChecker(encodings["unit"])
    assert check.counterexample(rect(g=(1, 20))) is None
    cex = check.counterexample(rect(g=(1, 21)))
    assert cex is not None and 20 < cex["g"] <= 21


def test_unit_run(runs):
    res = runs["unit"]
    lo, hi = res.dre["g"]
    assert res.converged
    assert 20 - 2 < hi <= 20
    assert EPS <= lo <= EPS + 2
    assert (lo, hi) == (Fraction(5, 4), Fraction(20))


def test_budget_zero(encodings):
    res = run_irr(encodings["twoact"], budget_steps=0)
    assert res.dre.is_point() and res.dre.as_dict() == {"g1": (5, 5), "g2": (7, 7)}
    assert not res.converged and set(res.unconverged) == {"g1", "g2"}
    assert [s.event for s in res.snapshots] == [ACCEPTED, DONE]


def test_invalid_nominal():
    base = parse_problem("problem blocked\nfluent done = 0\naction work\n  at-start done >= 1\n"
                         "  effect at-end done := 1\nend\ngoal done >= 1\n")
    p, plan = parametrize(base, parse_tt_plan("0: (work) [10]"), ["duration work as g"])
    with pytest.raises(InvalidNominal):
        run_irr(encode(p, plan))


def test_config_validation(encodings):
    enc = encodings["unit"]
    with pytest.raises(ValueError):
        run_irr(enc, beta=0)
    with pytest.raises(ValueError):
        run_irr(enc, omega={"nope": 1})
    with pytest.raises(ValueError):
        run_irr(enc, omega={"g": 0})


def test_omega_scales_first_step(encodings):
    res = run_irr(encodings["unit"], omega={"g": Fraction(1, 10)})
    assert res.snapshots[0].delta == (("g", Fraction(1)),)


def test_soundness_of_every_accepted_rectangle(encodings, runs):
    rng = random.Random(7)
    for name in FIXTURES:
        for R in runs[name].accepted:
            assert rectangle_sound(encodings[name], R, 10, rng), (name, R)


def test_monotone_growth(runs):
    for res in runs.values():
        acc = res.accepted
        assert all(a.subset_of(b) for a, b in zip(acc, acc[1:]))


def test_termination_all_steps_below_beta(runs):
    for res in runs.values():
        assert res.converged
        assert all(d < res.beta for _, d in res.snapshots[-1].delta)


def test_two_beta_maximality(encodings, runs):
    for name in FIXTURES:
        assert maximal(encodings[name], runs[name].dre, Fraction(1)) == [], name


def _chain(res):
    return [(s.step, s.event, s.param, s.direction, s.dre, s.delta) for s in res.snapshots]


def test_determinism(encodings, runs):
    again = run_irr(encodings["twoact"])
    assert _chain(again) == _chain(runs["twoact"])


def test_observer_gets_everything(encodings):
    seen = []
    res = run_irr(encodings["unit"], observer=seen.append)
    assert seen == res.snapshots
    assert seen[-1].event == DONE
    assert sum(s.event == FIRST_WIDENING for s in seen) == 1


def test_resource_limit_counts_as_rejection(encodings):
    enc = encodings["unit"]
    inner = EnvelopeChecker(enc)

    class Flaky:
        calls = 0

        def __call__(self, R):
            self.calls += 1
            if R["g"][1] > 15:
                raise ResourceLimit("synthetic")
            return inner(R)

    res = run_irr(enc, checker=Flaky())
    assert res.dre["g"][1] <= 15
    assert res.warnings and "synthetic" in res.warnings[0]


def test_round_robin():
    rr = RoundRobin()
    state = IRRState(None, {n: Fraction(1) for n in "abc"}, {}, Fraction(1))
    state.last_picked = "a"
    assert rr.pick_parameter(["a", "b", "c"], state) == "b"
    state.last_picked = "c"
    assert rr.pick_parameter(["a", "b", "c"], state) == "a"
    assert rr.pick_parameter(["c"], state) == "c"
    assert rr.pick_direction({LB}) == LB
    assert rr.pick_direction({UB, LB}) == UB


def _snap(step, width):
    return IRRSnapshot(step, rect(g=(0, width)), (("g", Fraction(1)),), 0.0, ACCEPTED)


def test_convergence_example():
    snaps = [_snap(0, 0), _snap(1, 10), _snap(2, 20)]
    assert convergence(snaps, rect(g=(0, 20))) == [(0, 0), (1, 50), (2, 100)]


def test_convergence_point_final():
    snaps = [_snap(0, 0)]
    assert convergence(snaps, rect(g=(0, 0))) == [(0, 100)]


def test_convergence_mismatch():
    with pytest.raises(ValueError):
        convergence([_snap(0, 0)], rect(h=(0, 1)))


def test_convergence_shape(runs):
    for res in runs.values():
        conv = convergence(res.snapshots)
        pcts = [p for _, p in conv]
        assert pcts == sorted(pcts) and pcts[-1] == 100
        assert res.first_widening_step is not None and res.first_widening_step <= res.steps


def test_serialization(tmp_path, runs):
    res = runs["twoact"]
    assert DRE.from_json(res.dre.to_json()) == res.dre
    path = tmp_path / "snaps.jsonl"
    write_snapshots(res.snapshots, path)
    back = read_snapshots(path)
    assert [(s.step, s.event, s.dre, s.delta) for s in back] == \
        [(s.step, s.event, s.dre, s.delta) for s in res.snapshots]
    doc = res.to_json()
    assert doc["run"]["steps"] == res.steps and doc["run"]["converged"]


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(12, 30))
def test_twoact_variants_sound_and_maximal(d1, d2, deadline):
    if d1 + d2 + 1 > deadline:
        return
    base = parse_problem(f"problem v\nfluent done = 0\naction a1\nend\naction a2\n"
                         f"  effect at-end done := 1\nend\ngoal done >= 1 deadline {deadline}\n")
    tt = parse_tt_plan(f"0: (a1) [{d1}]\n{d1}.001: (a2) [{d2}]")
    enc = encode(*parametrize(base, tt, ["duration a1", "duration a2"]))
    res = run_irr(enc)
    assert rectangle_sound(enc, res.dre, 5, random.Random(d1 * 100 + d2))
    assert maximal(enc, res.dre, Fraction(1)) == []
