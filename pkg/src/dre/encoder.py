"""Logical encodings of a parametrized plan.

Variables: ``t[<timepoint>]`` for happening times, ``s[<i>][<fluent>]`` for the
value of a fluent in the state after the i-th happening of the fixed order
(index 0 is the initial state, i.e. after plan-start), and the bare parameter
names.  Named constants of the problem are inlined.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .lra import FALSE, Formula, atom, conj, eliminate_exists, eq, le, substitute
from .lra.smtlib import dump
from .model.expr import LinearExpression
from .model.happenings import achiever, order_chain, separated_pairs
from .model.problem import PLAN_START, START, ModelError, ParametrizedProblem, ParametrizedSTNPlan


def time_var(tp: str) -> str:
    return f"t[{tp}]"


def state_var(i: int, fluent: str) -> str:
    return f"s[{i}][{fluent}]"


@dataclass(frozen=True)
class EncodingVariables:
    times: tuple
    states: tuple
    params: tuple

    @property
    def existential(self) -> frozenset:
        return frozenset(self.times) | frozenset(self.states)


@dataclass(frozen=True)
class PlanEncoding:
    problem: ParametrizedProblem
    plan: ParametrizedSTNPlan
    enc_tn: Formula
    enc_eff: Formula
    enc_proofs: Formula
    enc_valid: Formula
    vars: EncodingVariables
    nominal: dict = field(default_factory=dict)

    @property
    def params(self) -> tuple:
        return self.vars.params

    def schedule(self, model) -> dict:
        """Timepoint schedule read off a model of the encoding."""
        return {tp.name: model[time_var(tp.name)] for tp in self.plan.timepoints}

    def dump(self, directory):
        return dump({"enc_tn": self.enc_tn, "enc_eff": self.enc_eff,
                     "enc_proofs": self.enc_proofs, "enc_valid": self.enc_valid}, directory)


def _constants(problem):
    return {k: LinearExpression.const(v) for k, v in problem.constant_map.items()}


def _in_state(expr: LinearExpression, problem, i: int, consts) -> LinearExpression:
    b = dict(consts)
    for f in problem.fluent_map:
        b[f] = LinearExpression.var(state_var(i, f))
    return expr.substitute(b)


def _cond(c, problem, i, consts) -> Formula:
    return atom(_in_state(c.expr, problem, i, consts), c.op)


def _t(name):
    return LinearExpression.var(time_var(name))


def encode_tn(problem: ParametrizedProblem, plan: ParametrizedSTNPlan) -> Formula:
    consts = _constants(problem)
    parts = [eq(_t(plan.plan_start), 0)]
    for c in plan.constraints:
        parts.append(le(_t(c.ti) - _t(c.tj), c.bound.substitute(consts)))
    for a, b, gap in order_chain(problem, plan):
        parts.append(le(_t(a) + gap, _t(b)))
    return conj(*parts)


def _effects(problem, plan, name):
    tp = plan.tp_map[name]
    if tp.kind == PLAN_START:
        return ()
    act = problem.action_map[tp.action]
    return act.start_effects if tp.kind == START else act.end_effects


def encode_eff(problem: ParametrizedProblem, plan: ParametrizedSTNPlan) -> Formula:
    consts = _constants(problem)
    parts = []
    for f in problem.fluents:
        parts.append(eq(state_var(0, f.name), f.init.substitute(consts)))
    for i in range(1, len(plan.order)):
        effs = _effects(problem, plan, plan.order[i])
        written = {}
        for e in effs:
            if e.fluent in written:
                raise ModelError(f"two effects on {e.fluent} in happening {plan.order[i]}")
            written[e.fluent] = e.expr
        for f in problem.fluents:
            if f.name in written:
                rhs = _in_state(written[f.name], problem, i - 1, consts)
            else:
                rhs = LinearExpression.var(state_var(i - 1, f.name))
            parts.append(eq(state_var(i, f.name), rhs))
    return conj(*parts)


def encode_proofs(problem: ParametrizedProblem, plan: ParametrizedSTNPlan) -> Formula:
    consts = _constants(problem)
    pos = plan.position
    parts = []
    for (a, k), (s, e) in plan.instances.items():
        act = problem.action_map[a]
        i, j = pos[s], pos[e]
        parts.extend(_cond(c, problem, i - 1, consts) for c in act.at_start)
        parts.extend(_cond(c, problem, j - 1, consts) for c in act.at_end)
        for idx in range(i, j):
            parts.extend(_cond(c, problem, idx, consts) for c in act.over_all)
    last = len(plan.order) - 1
    for g in problem.goals:
        parts.append(_cond(g.condition, problem, last, consts))
        if g.deadline is not None:
            ach = achiever(problem, plan, g)
            if ach is not None:
                parts.append(le(_t(ach), g.deadline))
    eps = problem.epsilon
    for a, b in separated_pairs(problem, plan):
        parts.append(le(_t(a) + eps, _t(b)))
    return conj(*parts)


def encoding_variables(problem, plan) -> EncodingVariables:
    times = tuple(time_var(t) for t in plan.order)
    states = tuple(state_var(i, f.name) for i in range(len(plan.order)) for f in problem.fluents)
    return EncodingVariables(times, states, problem.param_names)


def build_enc_valid(problem, plan, enc_tn=None, enc_eff=None) -> Formula:
    """Projection of ``enc_tn & enc_eff`` onto the parameters."""
    tn = encode_tn(problem, plan) if enc_tn is None else enc_tn
    eff = encode_eff(problem, plan) if enc_eff is None else enc_eff
    v = encoding_variables(problem, plan)
    return eliminate_exists(v.existential, conj(tn, eff))


def encode(problem: ParametrizedProblem, plan: ParametrizedSTNPlan) -> PlanEncoding:
    tn = encode_tn(problem, plan)
    eff = encode_eff(problem, plan)
    proofs = encode_proofs(problem, plan)
    valid = build_enc_valid(problem, plan, tn, eff)
    return PlanEncoding(problem, plan, tn, eff, proofs, valid, encoding_variables(problem, plan),
                        dict(problem.nominal_valuation()))


def bind_params(f: Formula, valuation) -> Formula:
    return substitute(f, {k: Fraction(v) for k, v in valuation.items()})


__all__ = ["EncodingVariables", "PlanEncoding", "encode", "encode_tn", "encode_eff",
           "encode_proofs", "build_enc_valid", "encoding_variables", "time_var", "state_var",
           "bind_params", "FALSE"]
