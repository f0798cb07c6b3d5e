from __future__ import annotations

import json
import math
import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dre import data
from dre.data import fixture
from dre.dispatch import (FAILURE, REPLAN, SUCCESS, Baseline, CampaignConfig, ConfigError, DREEx,
                          Dist, EnvironmentModel, dispatch, get_scenario, min_max_dispatch_time,
                          parse_policy, simulate_campaign)
from dre.dispatch.campaign import IRRCache, run_episode
from dre.encoder import encode
from dre.irr import DRE, run_irr
from dre.model import parse_plan, parse_problem, validate_concrete

EPS = Fraction(1, 1000)


def rho(lo, hi):
    return DREEx(DRE((("g", Fraction(lo), Fraction(hi)),)))


def fixed(**durations):
    return EnvironmentModel({a: Dist(float(v)) for a, v in durations.items()}, {}, 0)


# -- windows ------------------------------------------------------------------

def test_window_under_envelope():
    p, plan = fixture("unit")
    assert min_max_dispatch_time("t2", plan, rho(0, 19), {"t1": 0}, p) == (EPS, 19)


def test_window_baseline_zero():
    p, plan = fixture("unit")
    assert min_max_dispatch_time("t2", plan, Baseline(0), {"t1": 0}, p) == (10, 10)


def test_window_unbounded():
    p = parse_problem(data.read("unit.problem"))
    text = data.read("unit.plan").replace("constraint t2 - t0 <= 20\n", "")
    text = text.replace("constraint t1 - t0 <= 0\n", "").replace("constraint t0 - t1 <= 0\n", "")
    plan = parse_plan(text, p)
    lo, hi = min_max_dispatch_time("t1", plan, rho(1, 19), {}, p)
    assert lo == 0 and hi == math.inf


def test_baseline_bounds():
    p, _ = fixture("unit")
    assert Baseline(20).bounds(p) == {"g": (8, 12)}
    assert parse_policy("Bl-30") == Baseline(30)
    assert parse_policy("DREEx") == "DREEx"
    for bad in ("Bl-", "Bl--1", "greedy"):
        with pytest.raises(ValueError):
            parse_policy(bad)


# -- dispatch -----------------------------------------------------------------

def test_dreex_within_envelope_succeeds():
    p, plan = fixture("unit")
    tr = dispatch(p, plan, rho(0, 19), fixed(work=12))
    assert tr.outcome == SUCCESS and tr.replan_count == 0
    assert tr.observed == {"g": 12}


def test_baseline_zero_replans_on_any_deviation():
    p, plan = fixture("unit")
    tr = dispatch(p, plan, Baseline(0), fixed(work=12))
    assert tr.outcome == REPLAN and tr.end_time == 10
    assert dispatch(p, plan, Baseline(0), fixed(work=10)).outcome == SUCCESS


def test_dreex_outside_envelope_replans():
    p, plan = fixture("unit")
    tr = dispatch(p, plan, rho(0, 19), fixed(work=21))
    assert tr.outcome == REPLAN and tr.end_time == 19
    assert not tr.in_envelope and tr.observed == {"g": 21}
    assert tr.resume_time == 21  # the action still finishes in the world


def test_early_end_before_window():
    p, plan = fixture("unit")
    tr = dispatch(p, plan, Baseline(10), fixed(work=5))
    assert tr.outcome == SUCCESS  # goal reached when dispatch stopped
    assert "earliest" in tr.reason


def test_rate_observed_and_replanned():
    p, plan = fixture("delivery_s_battery")
    env = EnvironmentModel({}, {"base1_o1:battery": Dist(20.0)}, 0)
    tr = dispatch(p, plan, Baseline(10), env)
    assert tr.outcome == REPLAN and tr.observed["rate_base1_o1_battery"] == 20
    tr = dispatch(p, plan, Baseline(10), EnvironmentModel({}, {}, 0))
    assert tr.outcome == SUCCESS


def test_world_failure_when_battery_runs_out():
    p, plan = fixture("delivery_s_battery")
    env = EnvironmentModel({}, {"fetch_o1:battery": Dist(99.0)}, 0)
    tr = dispatch(p, plan, DREEx(DRE.point(p.nominal_valuation()).replace(
        "rate_fetch_o1_battery", Fraction(0), Fraction(100))), env)
    assert tr.outcome == FAILURE


# -- properties ---------------------------------------------------------------

@pytest.fixture(scope="module")
def twoact_dre():
    p, plan = fixture("twoact")
    return p, plan, run_irr(encode(p, plan)).dre


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_window_soundness(twoact_dre, data_):
    p, plan, R = twoact_dre
    vals = {}
    for n, lo, hi in R.bounds:
        k = data_.draw(st.integers(0, 100))
        vals[n] = lo + (hi - lo) * Fraction(k, 100)
    env = fixed(a1=vals["g1"], a2=vals["g2"])
    tr = dispatch(p, plan, DREEx(R), env)
    assert tr.in_envelope and tr.outcome == SUCCESS
    assert set(tr.observed) == {"g1", "g2"}
    sched = {r["tp"]: r["time"] for r in tr.records}
    sched[plan.plan_start] = Fraction(0)
    for r in tr.records:
        lo, hi = r["window"]
        assert lo <= r["time"] <= hi
    assert validate_concrete(p, plan, tr.observed, sched)


def test_dist_sampling():
    d = Dist(10.0, 5.0, 2.5)
    rng = random.Random(1)
    xs = [d.sample(rng) for _ in range(500)]
    assert min(xs) >= Fraction(5, 2)
    assert all((x * 1000).denominator == 1 for x in xs)
    assert Dist(7.0).sample(rng) == 7


def test_common_random_numbers():
    env = get_scenario("delivery-s").environment(42)
    a = env.duration("i/0", "base1_o1", 0, 120)
    _ = env.duration("i/0", "base2_o1", 0, 145)
    assert env.duration("i/0", "base1_o1", 0, 120) == a
    assert env.duration("i/1", "base1_o1", 0, 120) != a
    assert EnvironmentModel.from_json(env.to_json()) == env


# -- replanner and campaigns ---------------------------------------------------

def test_replanner():
    sc = get_scenario("delivery-s")
    s = sc.initial_state()
    problem, tt, order = sc.replan(s, 0, {"o1": 600, "o2": 900})
    assert order == "o1" and [a.action for a in tt.actions][0] == "fetch_o1"
    assert sc.replan(s, 0, {"o1": 100, "o2": 100}) is None
    held = dict(s, holding_o1=Fraction(1), stage_o1=Fraction(2))
    steps = sc.steps_for(held, "o2")
    assert steps[0] == "dispose_o1"
    assert sc.replan(held, 0, {"o1": 1000, "o2": 1000})[2] == "o1"


def _small_config(**kw):
    base = json.loads(data.read("delivery_s_campaign.json"))
    base.update({"instances": base["instances"][:2], "episodes": 2}, **kw)
    return CampaignConfig.from_json(base)


def test_config_errors():
    base = json.loads(data.read("delivery_s_campaign.json"))
    for bad in ({**base, "policies": ["DREEx", "Bl-x"]}, {**base, "colour": 1},
                {k: v for k, v in base.items() if k != "instances"},
                {**base, "scenario": "mars"}, {**base, "policies": ["Bl-0", "Bl-0"]}, []):
        with pytest.raises(ConfigError):
            CampaignConfig.from_json(bad)


def test_zero_variance_campaign():
    cfg = CampaignConfig.load(data.campaign_path("delivery-s-stddev0"))
    cfg.instances, cfg.episodes = cfg.instances[:2], 1
    res = simulate_campaign(cfg)
    for row in res.rows():
        assert row["coverage"] == 100.0 and row["avg_replans"] == 0


def test_campaign_reproducible(tmp_path):
    cfg = _small_config(policies=["DREEx", "Bl-0", "Bl-30"])
    a, b = simulate_campaign(cfg), simulate_campaign(cfg)
    a.write_traces(tmp_path / "a.jsonl")
    b.write_traces(tmp_path / "b.jsonl")
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()
    a.write_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "instance,policy,coverage,avg_replans" and len(lines) == 4


def test_campaign_parallel_matches_serial():
    cfg = _small_config(policies=["DREEx", "Bl-10"])
    a, b = simulate_campaign(cfg, jobs=1), simulate_campaign(cfg, jobs=2)
    assert [e.to_json() for e in a.episodes] == [e.to_json() for e in b.episodes]


def test_dreex_guarantee_in_episodes():
    cfg = _small_config(policies=["DREEx"])
    res = simulate_campaign(cfg)
    assert all(e.guarantee_ok for e in res.episodes)


def test_replanner_error_is_episode_failure(monkeypatch):
    cfg = _small_config(policies=["Bl-0"])
    sc_cls = type(get_scenario("delivery-s"))

    def boom(self, *a, **k):
        raise RuntimeError("planner crashed")

    monkeypatch.setattr(sc_cls, "replan", boom)
    env = cfg.env()
    r = run_episode(cfg, cfg.instances[0], 0, "Bl-0", env, IRRCache(1, None, 10))
    assert not r.success and "planner crashed" in r.reason
