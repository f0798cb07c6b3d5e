"""Read/write footprints of happenings and the ordering chain they induce."""
from __future__ import annotations

from .problem import END, PLAN_START, START, ParametrizedProblem, ParametrizedSTNPlan


def _fluents_in(problem: ParametrizedProblem, exprs) -> set:
    fl = problem.fluent_map
    out = set()
    for e in exprs:
        out.update(v for v in e.variables if v in fl)
    return out


def footprint(problem: ParametrizedProblem, plan: ParametrizedSTNPlan, tp_name: str):
    """Return ``(reads, writes)`` fluent sets of a happening."""
    tp = plan.tp_map[tp_name]
    if tp.kind == PLAN_START:
        return frozenset(), frozenset()
    act = problem.action_map[tp.action]
    if tp.kind == START:
        conds = list(act.at_start) + list(act.over_all)
        effs = act.start_effects
    else:
        conds = list(act.at_end) + list(act.over_all)
        effs = act.end_effects
    reads = _fluents_in(problem, [c.expr for c in conds] + [e.expr for e in effs])
    writes = {e.fluent for e in effs}
    return frozenset(reads), frozenset(writes)


def interferes(problem, plan, a: str, b: str) -> bool:
    """Two happenings interfere if they belong to one action instance or one
    writes a fluent the other reads or writes."""
    ta, tb = plan.tp_map[a], plan.tp_map[b]
    if ta.kind != PLAN_START and tb.kind != PLAN_START and ta.key == tb.key:
        return True
    ra, wa = footprint(problem, plan, a)
    rb, wb = footprint(problem, plan, b)
    return bool(wa & (rb | wb)) or bool(wb & ra)


def order_chain(problem: ParametrizedProblem, plan: ParametrizedSTNPlan):
    """Consecutive pairs of the happening order with their minimum gap (0 or epsilon)."""
    out = []
    for a, b in zip(plan.order, plan.order[1:]):
        gap = problem.epsilon if interferes(problem, plan, a, b) else 0
        out.append((a, b, gap))
    return out


def separated_pairs(problem: ParametrizedProblem, plan: ParametrizedSTNPlan):
    """Non-adjacent interfering pairs ``(earlier, later)`` in the happening order."""
    order = plan.order
    out = []
    for i in range(len(order)):
        for j in range(i + 2, len(order)):
            if interferes(problem, plan, order[i], order[j]):
                out.append((order[i], order[j]))
    return out


def achiever(problem: ParametrizedProblem, plan: ParametrizedSTNPlan, goal) -> str | None:
    """Last happening in the order writing a fluent the goal mentions."""
    fluents = {v for v in goal.condition.variables if v in problem.fluent_map}
    last = None
    for name in plan.order:
        _, writes = footprint(problem, plan, name)
        if writes & fluents:
            last = name
    return last


__all__ = ["footprint", "interferes", "order_chain", "separated_pairs", "achiever", "START", "END"]
