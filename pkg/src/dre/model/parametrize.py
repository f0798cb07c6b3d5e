"""Turn a concrete time-triggered plan into a parametrized problem/STN pair."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .expr import LinearExpression, to_fraction
from .happenings import achiever
from .problem import (
    END,
    PLAN_START,
    START,
    DurativeAction,
    Effect,
    ModelError,
    ParametrizedProblem,
    ParametrizedSTNPlan,
    Parameter,
    StnConstraint,
    TimePoint,
    TimeTriggeredPlan,
)
from .validate import check_plan


class DirectiveError(ModelError):
    pass


@dataclass(frozen=True)
class Directive:
    kind: str  # "duration" | "rate"
    action: str
    fluent: str | None = None
    instance: int | None = None
    name: str | None = None
    weight: Fraction = Fraction(1)

    @property
    def target(self):
        return (self.kind, self.action, self.fluent, self.instance)


_DIRECTIVE_RE = re.compile(
    r"^\s*(duration)\s+([A-Za-z_]\w*)(?:#(\d+))?"
    r"|^\s*(rate)\s+([A-Za-z_]\w*)\s+([A-Za-z_]\w*)"
)


def parse_directive(text: str) -> Directive:
    """``duration <action>[#k] [as <name>] [weight <w>]`` or
    ``rate <action> <fluent> [as <name>] [weight <w>]``."""
    m = _DIRECTIVE_RE.match(text)
    if not m:
        raise DirectiveError(f"cannot parse directive {text!r}")
    rest = text[m.end():].split()
    name, weight = None, Fraction(1)
    while rest:
        if rest[0] == "as" and len(rest) >= 2:
            name = rest[1]
            rest = rest[2:]
        elif rest[0] == "weight" and len(rest) >= 2:
            weight = to_fraction(rest[1])
            rest = rest[2:]
        else:
            raise DirectiveError(f"unexpected {' '.join(rest)!r} in directive {text!r}")
    if name is not None and not name.isidentifier():
        raise DirectiveError(f"parameter name {name!r} is not an identifier")
    if weight <= 0:
        raise DirectiveError("directive weight must be positive")
    if m.group(1):
        inst = int(m.group(3)) if m.group(3) is not None else None
        return Directive("duration", m.group(2), None, inst, name, weight)
    return Directive("rate", m.group(5), m.group(6), None, name, weight)


def parametrize(problem: ParametrizedProblem, tt: TimeTriggeredPlan, directives=()):
    """Return ``(parametrized_problem, parametrized_stn_plan)``.

    Selected durations become parameters pinned on both sides of the STN
    duration constraint; selected consumption constants are replaced inside
    their action by a fresh parameter.  Everything else stays constant.
    """
    directives = [parse_directive(d) if isinstance(d, str) else d for d in directives]
    targets = [d.target for d in directives]
    if len(set(targets)) != len(targets):
        raise DirectiveError("duplicate directive")

    instances = []  # (action, k, start, duration)
    counter: dict = {}
    for ta in tt.actions:
        if ta.action not in problem.action_map:
            raise DirectiveError(f"plan uses unknown action {ta.action!r}")
        k = counter.get(ta.action, 0)
        counter[ta.action] = k + 1
        instances.append((ta.action, k, ta.start, ta.duration))

    taken = set(problem.param_map) | set(problem.constant_map) | set(problem.fluent_map)
    new_params: list = []

    def fresh(name):
        if name in taken:
            raise DirectiveError(f"parameter name {name!r} already in use")
        taken.add(name)
        return name

    dur_param: dict = {}
    for d in directives:
        if d.kind != "duration":
            continue
        hits = [(a, k, s, dur) for a, k, s, dur in instances
                if a == d.action and (d.instance is None or d.instance == k)]
        if not hits:
            raise DirectiveError(f"no instance of {d.action!r} to parametrize")
        if d.name is not None and len(hits) > 1:
            raise DirectiveError(f"'as {d.name}' needs a single instance of {d.action}")
        for a, k, _, dur in hits:
            if (a, k) in dur_param:
                raise DirectiveError(f"duration of {a}#{k} parametrized twice")
            if d.name is not None:
                pname = d.name
            elif counter[a] == 1:
                pname = f"dur_{a}"
            else:
                pname = f"dur_{a}_{k}"
            pname = fresh(pname)
            dur_param[(a, k)] = pname
            new_params.append(Parameter(pname, dur, d.weight))

    actions = {a.name: a for a in problem.actions}
    for d in directives:
        if d.kind != "rate":
            continue
        act = actions.get(d.action)
        if act is None:
            raise DirectiveError(f"unknown action {d.action!r}")
        effs = [e for e in act.start_effects + act.end_effects if e.fluent == d.fluent]
        consts = sorted({v for e in effs for v in e.expr.variables if v in problem.constant_map})
        if not effs or len(consts) != 1:
            raise DirectiveError(f"{d.action} has no single consumption constant on {d.fluent!r}")
        const = consts[0]
        pname = fresh(d.name or f"rate_{d.action}_{d.fluent}")
        new_params.append(Parameter(pname, problem.constant_map[const], d.weight))
        actions[d.action] = _rename_in_action(act, const, pname)

    pproblem = ParametrizedProblem(
        problem.name, problem.fluents, tuple(actions[a.name] for a in problem.actions),
        problem.goals, problem.params + tuple(new_params), problem.constants, problem.epsilon,
    )

    tps = [TimePoint("t0", PLAN_START)]
    cons = []
    events = []  # (time, creation index, name)
    idx = 1
    for a, k, s, dur in instances:
        ts, te = f"t{idx}", f"t{idx + 1}"
        idx += 2
        tps.append(TimePoint(ts, START, a, k))
        tps.append(TimePoint(te, END, a, k))
        events.append((s, len(events), ts))
        events.append((s + dur, len(events), te))
        if s == 0:
            cons.append(StnConstraint(ts, "t0", LinearExpression()))
        cons.append(StnConstraint("t0", ts, LinearExpression()))
        if (a, k) in dur_param:
            g = dur_param[(a, k)]
            cons.append(StnConstraint(te, ts, LinearExpression.var(g)))
            cons.append(StnConstraint(ts, te, LinearExpression.var(g, -1)))
        else:
            cons.append(StnConstraint(te, ts, LinearExpression.const(dur)))
            cons.append(StnConstraint(ts, te, LinearExpression.const(-dur)))
    order = ("t0",) + tuple(n for _, _, n in sorted(events))

    draft = ParametrizedSTNPlan(tuple(tps), tuple(cons), order, problem.name)
    for goal in pproblem.goals:
        if goal.deadline is None:
            continue
        ach = achiever(pproblem, draft, goal)
        if ach is not None:
            cons.append(StnConstraint(ach, "t0", LinearExpression.const(goal.deadline)))
    plan = check_plan(pproblem, tps, cons, order, problem.name)
    return pproblem, plan


def _rename_in_action(act: DurativeAction, old: str, new: str) -> DurativeAction:
    m = {old: new}

    def conds(cs):
        return tuple(type(c)(c.expr.rename(m), c.op) for c in cs)

    def effs(es):
        return tuple(Effect(e.fluent, e.expr.rename(m)) for e in es)

    return DurativeAction(act.name, conds(act.at_start), conds(act.over_all), conds(act.at_end),
                          effs(act.start_effects), effs(act.end_effects))


__all__ = ["Directive", "DirectiveError", "parse_directive", "parametrize"]
