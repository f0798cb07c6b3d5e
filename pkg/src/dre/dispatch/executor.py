"""STN dispatching against a simulated world.

The dispatcher walks the fixed happening order.  For each happening it asks
the distance graph for the tightest window given what has been observed so
far, starts actions as early as the window allows, and stops as soon as an
action cannot start in time, ends outside its window, or (depending on the
policy) an observed parameter leaves its admitted range.  Times here are
relative to the plan start.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from ..irr import DRE
from ..model.expr import check_relation, format_fraction
from ..model.happenings import order_chain
from ..model.problem import PLAN_START, START, ParametrizedProblem, ParametrizedSTNPlan
from ..model.stn import DistanceGraph, NegativeCycle
from ..model.validate import nominal_schedule
from .environment import EnvironmentModel

SUCCESS, REPLAN, FAILURE = "success", "replan-triggered", "failure"


@dataclass(frozen=True)
class DREEx:
    """Accept any parameter value inside the envelope."""

    dre: DRE

    @property
    def name(self) -> str:
        return "DREEx"

    def bounds(self, problem) -> dict:
        return self.dre.as_dict()


@dataclass(frozen=True)
class Baseline:
    """Accept deviations of at most ``slack_percent`` from the nominal value."""

    slack_percent: int

    @property
    def name(self) -> str:
        return f"Bl-{self.slack_percent}"

    def bounds(self, problem) -> dict:
        k = Fraction(self.slack_percent, 100)
        out = {}
        for p in problem.params:
            a, b = p.nominal * (1 - k), p.nominal * (1 + k)
            out[p.name] = (max(min(a, b), Fraction(0)), max(a, b))
        return out


ExecutionPolicy = (DREEx, Baseline)


def parse_policy(name: str):
    """``"Bl-<X>"`` into a :class:`Baseline`; ``"DREEx"`` is returned as the string marker."""
    if name == "DREEx":
        return name
    if name.startswith("Bl-") and name[3:].isdigit():
        return Baseline(int(name[3:]))
    raise ValueError(f"unknown policy {name!r} (expected DREEx or Bl-<percent>)")


def param_sources(problem: ParametrizedProblem, plan: ParametrizedSTNPlan) -> dict:
    """Where each parameter becomes observable.

    ``("duration", start_tp, end_tp)`` or ``("rate", action, fluent)``.
    """
    out = {}
    inst_of = {(s, e): key for key, (s, e) in plan.instances.items()}
    for c in plan.constraints:
        p = c.param
        if p is None or p in out:
            continue
        if (c.tj, c.ti) in inst_of and c.bound.coef(p) > 0:
            out[p] = ("duration", c.tj, c.ti)
    params = set(problem.param_map)
    for act in problem.actions:
        for e in act.start_effects + act.end_effects:
            for v in e.expr.variables:
                if v in params and v not in out:
                    out[v] = ("rate", act.name, e.fluent)
    return out


def _rate_symbol(problem, act, fluent):
    names = set(problem.param_map) | set(problem.constant_map)
    for e in act.start_effects + act.end_effects:
        if e.fluent == fluent:
            syms = sorted(v for v in e.expr.variables if v in names)
            if len(syms) == 1:
                return syms[0]
    return None


def base_graph(problem, plan, bounds: dict) -> DistanceGraph:
    """Distance graph with parameter bounds widened to the admitted ranges."""
    nominal = problem.nominal_valuation()
    g = DistanceGraph([t.name for t in plan.timepoints])
    for c in plan.constraints:
        p = c.param
        if p is None:
            w = c.bound.constant
        else:
            sign = c.bound.coef(p)
            lo, hi = bounds.get(p, (nominal[p], nominal[p]))
            w = c.bound.constant + sign * (hi if sign > 0 else lo)
        g.add(c.ti, c.tj, w)
    for a, b, gap in order_chain(problem, plan):
        g.add(a, b, -gap)
    g.pin(plan.plan_start, plan.plan_start, Fraction(0))
    return g


def min_max_dispatch_time(n: str, plan, bounds_or_policy, observed: dict, problem=None,
                          graph: DistanceGraph | None = None):
    """Window ``(min, max)`` for timepoint ``n`` relative to the plan start.

    ``max`` may be ``math.inf``.  Raises :class:`NegativeCycle` when the
    observations already contradict the network.
    """
    if graph is None:
        bounds = bounds_or_policy
        if hasattr(bounds_or_policy, "bounds"):
            bounds = bounds_or_policy.bounds(problem)
        graph = base_graph(problem, plan, bounds)
    g = graph.copy()
    t0 = plan.plan_start
    for k, v in observed.items():
        g.pin(k, t0, v)
    if not g.consistent():
        raise NegativeCycle()
    return g.window(n, t0)


@dataclass
class ExecutionTrace:
    records: list = field(default_factory=list)
    outcome: str = FAILURE
    reason: str = ""
    replan_count: int = 0
    end_time: Fraction = Fraction(0)
    resume_time: Fraction = Fraction(0)
    state: dict = field(default_factory=dict)
    observed: dict = field(default_factory=dict)
    in_envelope: bool = True
    last_write: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def fmt(x):
            if isinstance(x, Fraction):
                return format_fraction(x)
            if isinstance(x, float) and math.isinf(x):
                return "inf" if x > 0 else "-inf"
            return x
        return {
            "outcome": self.outcome,
            "reason": self.reason,
            "replans": self.replan_count,
            "end_time": fmt(self.end_time),
            "resume_time": fmt(self.resume_time),
            "in_envelope": self.in_envelope,
            "observed": {k: fmt(v) for k, v in self.observed.items()},
            "records": [{k: (fmt(v) if not isinstance(v, (list, tuple)) else [fmt(x) for x in v])
                         for k, v in r.items()} for r in self.records],
        }


class _World:
    def __init__(self, problem, state):
        self.problem = problem
        self.state = dict(state)
        self.base_env = dict(problem.constant_map)
        self.base_env.update(problem.nominal_valuation())
        self.last_write: dict = {}
        self.running: dict = {}  # instance key -> (over_all conditions, env)

    def holds(self, conds, env) -> bool:
        vals = {**env, **self.state}
        return all(check_relation(c.expr.evaluate(vals), c.op) for c in conds)

    def apply(self, conds, effects, env, t) -> bool:
        if not self.holds(conds, env):
            return False
        snap = {**env, **self.state}
        new = {e.fluent: e.expr.evaluate(snap) for e in effects}
        self.state.update(new)
        for f in new:
            self.last_write[f] = t
        return all(self.holds(c, e) for c, e in self.running.values())

    def goals_met(self) -> bool:
        env = {**self.base_env, **self.state}
        for g in self.problem.goals:
            if not check_relation(g.condition.expr.evaluate(env), g.condition.op):
                return False
            if g.deadline is not None:
                ts = [self.last_write[f] for f in g.condition.variables if f in self.last_write]
                if ts and max(ts) > g.deadline:
                    return False
        return True


def dispatch(problem: ParametrizedProblem, plan: ParametrizedSTNPlan, policy,
             env: EnvironmentModel, episode=0, occurrences: Counter | None = None,
             state: dict | None = None) -> ExecutionTrace:
    """Execute ``plan`` in the simulated world until it completes or must stop."""
    occurrences = Counter() if occurrences is None else occurrences
    if state is None:
        consts = {**problem.constant_map, **problem.nominal_valuation()}
        state = {f.name: f.init.evaluate(consts) for f in problem.fluents}
    world = _World(problem, state)
    bounds = policy.bounds(problem)
    graph = base_graph(problem, plan, bounds)
    sources = param_sources(problem, plan)
    nominal = problem.nominal_valuation()
    sched = nominal_schedule(problem, plan)
    t0 = plan.plan_start
    tpmap = plan.tp_map

    trace = ExecutionTrace()
    observed_times = {t0: Fraction(0)}
    now = Fraction(0)
    running: dict = {}  # key -> dict(start, true_end, env, end_tp)

    def admitted(p, v) -> bool:
        lo, hi = bounds.get(p, (nominal[p], nominal[p]))
        return lo <= v <= hi

    def observe(p, v):
        trace.observed[p] = v
        ok = admitted(p, v)
        if not ok:
            trace.in_envelope = False
        return ok

    def window(n):
        g = graph.copy()
        for k, v in observed_times.items():
            if k != t0:
                g.pin(k, t0, v)
        if not g.consistent():
            return None
        return g.window(n, t0)

    def finish(outcome, reason, t):
        # actions already running keep going in the world; let them complete
        trace.end_time = t
        if outcome != FAILURE and world.goals_met():
            outcome = SUCCESS
        resume = t
        for key, r in sorted(running.items(), key=lambda kv: kv[1]["true_end"]):
            act = problem.action_map[key[0]]
            world.running.pop(key, None)
            ok = world.apply(act.at_end, act.end_effects, r["env"], r["true_end"])
            trace.records.append({"tp": r["end_tp"], "action": key[0], "kind": "end",
                                  "time": r["true_end"], "window": ["-", "-"],
                                  "note": "completed after dispatch ended"})
            resume = max(resume, r["true_end"])
            for p, src in sources.items():
                if src[0] == "duration" and src[2] == r["end_tp"]:
                    observe(p, r["true_end"] - r["start"])
            for p in _rate_params(sources, key[0], act.end_effects):
                observe(p, r["env"][p])
            if not ok:
                outcome, reason = FAILURE, f"condition violated when {key[0]} ended"
        running.clear()
        trace.resume_time = resume
        trace.state = dict(world.state)
        trace.last_write = dict(world.last_write)
        trace.outcome, trace.reason = outcome, reason
        return trace

    for n in plan.order[1:]:
        tp = tpmap[n]
        act = problem.action_map[tp.action]
        w = window(n)
        if w is None:
            return finish(REPLAN, "observations contradict the network", now)
        lo, hi = w
        if tp.kind == START:
            t = max(now, lo)
            # anything running that is overdue before we could start?
            for key, r in running.items():
                wl, wh = window(r["end_tp"]) or (lo, hi)
                if r["true_end"] > wh and wh < t:
                    return finish(REPLAN, f"{key[0]} did not end by its latest time",
                                  max(now, Fraction(wh)))
                if r["true_end"] < t:
                    return finish(REPLAN, f"{key[0]} ended out of order", r["true_end"])
            if t > hi:
                return finish(REPLAN, f"{tp.action} could not start by its latest time", now)
            now = t
            observed_times[n] = t
            occ = occurrences[tp.action]
            occurrences[tp.action] += 1
            s, e = plan.instances[tp.key]
            nominal_dur = sched[e] - sched[s]
            true_dur = env.duration(episode, tp.action, occ, nominal_dur)
            inst_env = dict(world.base_env)
            rate_obs = []
            for eff in act.start_effects + act.end_effects:
                sym = _rate_symbol(problem, act, eff.fluent)
                if sym is None or f"{tp.action}:{eff.fluent}" not in env.rates:
                    continue
                v = env.rate(episode, tp.action, eff.fluent, occ, world.base_env[sym])
                inst_env[sym] = v
                rate_obs.append((sym, eff.fluent, v))
            running[tp.key] = {"start": t, "true_end": t + true_dur, "env": inst_env,
                               "end_tp": e, "rates": rate_obs}
            ok = world.apply(act.at_start, act.start_effects, inst_env, t)
            world.running[tp.key] = (act.over_all, inst_env)
            trace.records.append({"tp": n, "action": tp.action, "kind": "start", "time": t,
                                  "window": [lo, hi]})
            if not ok:
                running.pop(tp.key)
                world.running.pop(tp.key, None)
                return finish(FAILURE, f"condition violated when {tp.action} started", t)
            bad = [p for p in _rate_params(sources, tp.action, act.start_effects)
                   if not observe(p, inst_env[p])]
            if bad:
                return finish(REPLAN, f"observed {bad[0]} outside admitted range", t)
        else:
            r = running.get(tp.key)
            if r is None:
                return finish(FAILURE, f"{tp.action} ends without having started", now)
            T = r["true_end"]
            if T > hi:
                return finish(REPLAN, f"{tp.action} did not end by its latest time",
                              max(now, Fraction(hi)))
            running.pop(tp.key)
            world.running.pop(tp.key, None)
            ok = world.apply(act.at_end, act.end_effects, r["env"], T)
            now = max(now, T)
            observed_times[n] = T
            trace.records.append({"tp": n, "action": tp.action, "kind": "end", "time": T,
                                  "window": [lo, hi]})
            if not ok:
                return finish(FAILURE, f"condition violated when {tp.action} ended", T)
            if T < lo:
                return finish(REPLAN, f"{tp.action} ended before its earliest time", T)
            bad = []
            for p, src in sources.items():
                if src[0] == "duration" and src[2] == n:
                    if not observe(p, T - r["start"]):
                        bad.append(p)
            for p in _rate_params(sources, tp.action, act.end_effects):
                if not observe(p, r["env"][p]):
                    bad.append(p)
            if bad:
                return finish(REPLAN, f"observed {bad[0]} outside admitted range", T)
    if world.goals_met():
        return finish(SUCCESS, "plan completed", now)
    return finish(REPLAN, "plan completed without achieving the goals", now)


def _rate_params(sources, action, effects):
    fl = {e.fluent for e in effects}
    return [p for p, s in sources.items() if s[0] == "rate" and s[1] == action and s[2] in fl]


__all__ = ["DREEx", "Baseline", "ExecutionTrace", "ExecutionPolicy", "SUCCESS", "REPLAN",
           "FAILURE", "base_graph", "dispatch", "min_max_dispatch_time", "param_sources",
           "parse_policy"]
