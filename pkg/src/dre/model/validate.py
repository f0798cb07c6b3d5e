"""Plan construction checks and the concrete plan-validity oracle.

``validate_concrete`` is the brute-force reference for the whole engine.  It
simulates the plan state by state and deliberately re-derives the happening
footprints itself instead of importing them from the encoder side.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .expr import check_relation, to_fraction
from .happenings import order_chain
from .problem import (
    PLAN_START,
    START,
    IncompletePlan,
    InconsistentPlan,
    InvalidProblem,
    ParametrizedProblem,
    ParametrizedSTNPlan,
    StnConstraint,
    TimePoint,
    UndeclaredSymbol,
)
from .stn import DistanceGraph, NegativeCycle


def check_plan(problem: ParametrizedProblem, timepoints, constraints, order=None,
               name: str = "plan") -> ParametrizedSTNPlan:
    """Build a plan object, rejecting malformed or nominally infeasible plans."""
    tps = tuple(timepoints)
    names = [t.name for t in tps]
    if len(set(names)) != len(names):
        raise InvalidProblem("duplicate timepoint name")
    starts = [t for t in tps if t.kind == PLAN_START]
    if len(starts) != 1:
        raise IncompletePlan("a plan needs exactly one plan-start timepoint")
    seen: dict = {}
    for t in tps:
        if t.kind == PLAN_START:
            continue
        if t.action not in problem.action_map:
            raise UndeclaredSymbol(f"timepoint {t.name} refers to unknown action {t.action!r}")
        slot = seen.setdefault(t.key, {})
        if t.kind in slot:
            raise InvalidProblem(f"{t.kind} of {t.action}#{t.instance} declared twice")
        slot[t.kind] = t.name
    for key, slot in seen.items():
        if len(slot) != 2:
            missing = "end" if START in slot else "start"
            raise IncompletePlan(f"action {key[0]}#{key[1]} has no {missing} timepoint")
    name_set = set(names)
    params = problem.param_map
    for c in constraints:
        for t in (c.ti, c.tj):
            if t not in name_set:
                raise UndeclaredSymbol(f"constraint refers to unknown timepoint {t!r}")
        if c.param is not None and c.param not in params:
            raise UndeclaredSymbol(f"constraint refers to unknown parameter {c.param!r}")
    constraints = tuple(constraints)
    t0 = starts[0].name
    nominal = problem.nominal_valuation()

    if order is None:
        g = DistanceGraph(names)
        for c in constraints:
            g.add(c.ti, c.tj, c.bound_value(nominal))
        for n in names:
            g.add(t0, n, Fraction(0))
        g.pin(t0, t0, Fraction(0))
        try:
            times = g.earliest(t0)
        except NegativeCycle:
            raise InconsistentPlan("STN is infeasible at the nominal valuation") from None
        decl = {n: i for i, n in enumerate(names)}
        order = tuple(sorted(names, key=lambda n: (n != t0, times[n], decl[n])))
    else:
        order = tuple(order)
        if sorted(order) != sorted(names):
            missing = sorted(name_set - set(order)) or sorted(set(order) - name_set)
            raise IncompletePlan(f"order must list every timepoint exactly once (check {missing[:1]})")
    if order[0] != t0:
        raise InvalidProblem("the plan-start timepoint must come first in the order")

    plan = ParametrizedSTNPlan(tps, constraints, order, name)
    pos = plan.position
    for key, slot in seen.items():
        if pos[slot[START]] > pos[slot["end"]]:
            raise InconsistentPlan(f"end of {key[0]}#{key[1]} is ordered before its start")
    if nominal_schedule(problem, plan) is None:
        raise InconsistentPlan("the nominal schedule violates the plan constraints")
    return plan


def nominal_schedule(problem: ParametrizedProblem, plan: ParametrizedSTNPlan,
                     valuation: Mapping | None = None):
    """Earliest schedule respecting the STN and the happening order, or None."""
    v = problem.nominal_valuation() if valuation is None else valuation
    g = stn_graph(problem, plan, v)
    if not g.consistent():
        return None
    return g.earliest(plan.plan_start)


def stn_graph(problem, plan, valuation) -> DistanceGraph:
    """Distance graph of the plan constraints plus the ordering chain at a valuation."""
    t0 = plan.plan_start
    g = DistanceGraph([t.name for t in plan.timepoints])
    for c in plan.constraints:
        g.add(c.ti, c.tj, c.bound_value(valuation))
    for a, b, gap in order_chain(problem, plan):
        g.add(a, b, -gap)
    g.pin(t0, t0, Fraction(0))
    return g


# --------------------------------------------------------------------------
# concrete oracle


def _rw(problem, tp: TimePoint):
    act = problem.action_map[tp.action]
    fl = problem.fluent_map
    if tp.kind == START:
        conds, effs = act.at_start + act.over_all, act.start_effects
    else:
        conds, effs = act.at_end + act.over_all, act.end_effects
    reads = set()
    for c in conds:
        reads |= {x for x in c.expr.variables if x in fl}
    for e in effs:
        reads |= {x for x in e.expr.variables if x in fl}
    return reads, {e.fluent for e in effs}


def validate_concrete(problem: ParametrizedProblem, plan: ParametrizedSTNPlan,
                      valuation: Mapping, schedule: Mapping) -> bool:
    """True iff the plan executed at ``schedule`` under ``valuation`` is valid."""
    env = {k: to_fraction(v) for k, v in problem.constants}
    env.update({k: to_fraction(v) for k, v in valuation.items()})
    if any(p.name not in env for p in problem.params):
        return False
    times = {}
    for t in plan.timepoints:
        if t.name not in schedule:
            return False
        times[t.name] = to_fraction(schedule[t.name])
    if times[plan.plan_start] != 0:
        return False

    for c in plan.constraints:
        if times[c.ti] - times[c.tj] > c.bound.evaluate(env):
            return False

    order = plan.order
    for a, b in zip(order, order[1:]):
        if times[a] > times[b]:
            return False

    tpmap = plan.tp_map
    footprints = {}
    for n in order:
        tp = tpmap[n]
        footprints[n] = (set(), set()) if tp.kind == PLAN_START else _rw(problem, tp)
    eps = problem.epsilon
    for i, a in enumerate(order):
        ra, wa = footprints[a]
        for b in order[i + 1:]:
            rb, wb = footprints[b]
            same = tpmap[a].kind != PLAN_START and tpmap[a].key == tpmap[b].key
            if same or (wa & (rb | wb)) or (wb & ra):
                if times[b] - times[a] < eps:
                    return False

    state = {f.name: f.init.evaluate(env) for f in problem.fluents}
    running: dict = {}
    last_writer: dict = {}

    def holds(cond):
        return check_relation(cond.expr.evaluate({**env, **state}), cond.op)

    for n in order[1:]:
        tp = tpmap[n]
        act = problem.action_map[tp.action]
        if tp.kind == START:
            conds, effs = act.at_start, act.start_effects
        else:
            conds, effs = act.at_end, act.end_effects
        if not all(holds(c) for c in conds):
            return False
        snapshot = {**env, **state}
        new_vals = {e.fluent: e.expr.evaluate(snapshot) for e in effs}
        state.update(new_vals)
        for f in new_vals:
            last_writer[f] = n
        if tp.kind == START:
            running[tp.key] = act.over_all
        else:
            running.pop(tp.key, None)
        for conds_oa in running.values():
            if not all(holds(c) for c in conds_oa):
                return False

    for goal in problem.goals:
        if not holds(goal.condition):
            return False
        if goal.deadline is not None:
            writers = [last_writer[f] for f in goal.condition.variables if f in last_writer]
            if writers:
                ach = max(writers, key=plan.position.__getitem__)
                if times[ach] > goal.deadline:
                    return False
    return True


__all__ = ["check_plan", "nominal_schedule", "stn_graph", "validate_concrete", "StnConstraint"]
