from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dre import data
from dre.data import fixture
from dre.model import (IncompletePlan, InconsistentPlan, InvalidProblem, ParseError,
                       UndeclaredSymbol, nominal_schedule, parametrize, parse_plan, parse_problem,
                       parse_tt_plan, print_plan, print_problem, print_tt_plan, problem_from_json,
                       problem_to_json, validate_concrete)
from dre.model.happenings import achiever, order_chain, separated_pairs
from dre.model.stn import DistanceGraph, NegativeCycle

UNIT = data.read("unit.problem")
UNIT_PLAN = data.read("unit.plan")


def unit():
    p = parse_problem(UNIT)
    return p, parse_plan(UNIT_PLAN, p)


def test_parse_unit():
    p, plan = unit()
    assert [g.name for g in p.params] == ["g"]
    assert p.params[0].nominal == 10
    assert nominal_schedule(p, plan) == {"t0": 0, "t1": 0, "t2": 10}


def test_undeclared_goal_fluent():
    with pytest.raises(UndeclaredSymbol):
        parse_problem(UNIT.replace("goal done >= 1", "goal missing >= 1"))


def test_nonpositive_epsilon():
    with pytest.raises(InvalidProblem):
        parse_problem(UNIT.replace("epsilon 1/1000", "epsilon 0"))


def test_parse_error_has_location():
    with pytest.raises(ParseError) as err:
        parse_problem(UNIT.replace("action work", "action"))
    assert "line" in str(err.value)


def test_inconsistent_plan():
    p = parse_problem(UNIT)
    with pytest.raises(InconsistentPlan):
        parse_plan(UNIT_PLAN.replace("order", "constraint t2 - t0 <= 5\norder"), p)


def test_incomplete_plan():
    p = parse_problem(UNIT)
    text = "\n".join(ln for ln in UNIT_PLAN.splitlines() if "t2" not in ln)
    with pytest.raises(IncompletePlan):
        parse_plan(text, p)


def test_round_trips():
    p, plan = unit()
    assert parse_problem(print_problem(p)) == p
    assert parse_plan(print_plan(plan), p) == plan
    assert problem_from_json(problem_to_json(p)) == p
    tt = parse_tt_plan(data.read("twoact.tt"))
    assert parse_tt_plan(print_tt_plan(tt)) == tt


def test_parametrize_matches_hand_fixtures():
    p, plan = unit()
    q, qplan = fixture("unit")
    assert q == p
    assert nominal_schedule(q, qplan) == nominal_schedule(p, plan)
    two, _ = fixture("twoact")
    assert two == parse_problem(data.read("twoact.problem"))


def test_parametrize_without_directives():
    base = parse_problem(data.read("unit_base.problem"))
    p, plan = parametrize(base, parse_tt_plan(data.read("unit.tt")), [])
    assert p.params == ()
    assert all(c.param is None for c in plan.constraints)


def test_rate_directive_replaces_consumption():
    p, plan = fixture("delivery_s_battery")
    names = [g.name for g in p.params]
    assert "rate_base1_o1_battery" in names
    nominal = {g.name: g.nominal for g in p.params}
    assert nominal["rate_base1_o1_battery"] == 8
    assert validate_concrete(p, plan, nominal, nominal_schedule(p, plan))


def test_validate_concrete_examples():
    p, plan = unit()
    assert validate_concrete(p, plan, {"g": 10}, {"t0": 0, "t1": 0, "t2": 10})
    assert not validate_concrete(p, plan, {"g": 25}, {"t0": 0, "t1": 0, "t2": 25})
    assert not validate_concrete(p, plan, {"g": 10}, {"t0": 0, "t1": 0, "t2": 9})


def test_happenings_twoact():
    p, plan = fixture("twoact")
    chain = order_chain(p, plan)
    assert [(a, b) for a, b, _ in chain] == list(zip(plan.order, plan.order[1:]))
    end_a1, start_a2 = plan.instances[("a1", 0)][1], plan.instances[("a2", 0)][0]
    assert (end_a1, start_a2, p.epsilon) in chain
    sep = separated_pairs(p, plan)
    assert all(a in plan.order and b in plan.order for a, b in sep)
    goal = p.goals[0]
    assert achiever(p, plan, goal) == plan.order[-1]


def test_distance_graph():
    g = DistanceGraph(["a", "b", "c"])
    g.add("b", "a", 5)      # b - a <= 5
    g.add("a", "b", -2)     # a - b <= -2
    g.add("c", "b", 3)
    g.pin("a", "a", 0)
    assert g.window("b", "a") == (2, 5)
    assert g.window("c", "a")[1] == 8
    g.add("b", "c", -10)
    with pytest.raises(NegativeCycle):
        g.window("b", "a")


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=0, max_value=30, max_denominator=8))
def test_unit_validity_is_the_interval(gv):
    p, plan = unit()
    sched = nominal_schedule(p, plan, {"g": gv}) if gv > 0 else None
    ok = sched is not None and validate_concrete(p, plan, {"g": gv}, sched)
    assert ok == (Fraction(1, 1000) <= gv <= 20)
