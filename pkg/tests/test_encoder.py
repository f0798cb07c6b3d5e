from __future__ import annotations

import dataclasses
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from dre.data import fixture
from dre.encoder import (bind_params, build_enc_valid, encode, encode_eff, encode_proofs,
                         encode_tn, state_var, time_var)
from dre.lra import conj, eq, evaluate, ge, implies, is_sat, is_valid, le
from dre.model import StnConstraint, nominal_schedule, validate_concrete
from dre.model.expr import LinearExpression as L
from dre.model.happenings import footprint

EPS = Fraction(1, 1000)
T = lambda n: L.var(time_var(n))  # noqa: E731
S = lambda i, f: L.var(state_var(i, f))  # noqa: E731
g, g1, g2 = L.var("g"), L.var("g1"), L.var("g2")


def equivalent(a, b) -> bool:
    return is_valid(implies(a, b)) and is_valid(implies(b, a))


def test_unit_enc_tn():
    p, plan = fixture("unit")
    expected = conj(eq(T("t0"), 0), le(T("t1") - T("t0"), 0), le(T("t0") - T("t1"), 0),
                    le(T("t2") - T("t1"), g), le(T("t1") - T("t2"), -g), le(T("t2") - T("t0"), 20),
                    le(T("t0"), T("t1")), le(T("t1") + EPS, T("t2")))
    assert equivalent(encode_tn(p, plan), expected)


def test_unit_enc_eff_and_proofs():
    p, plan = fixture("unit")
    assert equivalent(encode_eff(p, plan),
                      conj(eq(S(0, "done"), 0), eq(S(1, "done"), S(0, "done")), eq(S(2, "done"), 1)))
    assert equivalent(encode_proofs(p, plan), conj(ge(S(2, "done"), 1), le(T("t2"), 20)))


def test_unit_enc_valid():
    # the start/end chain forces g >= epsilon, so the region is [epsilon, 20]
    p, plan = fixture("unit")
    assert equivalent(build_enc_valid(p, plan), conj(ge(g, EPS), le(g, 20)))


def test_twoact_separation_and_valid():
    p, plan = fixture("twoact")
    end_a1, start_a2 = plan.instances[("a1", 0)][1], plan.instances[("a2", 0)][0]
    enc = encode(p, plan)
    assert is_valid(implies(enc.enc_tn, le(T(end_a1) + EPS, T(start_a2))))
    assert equivalent(enc.enc_valid, conj(ge(g1, EPS), ge(g2, EPS), le(g1 + g2, 20 - EPS)))


def test_twoact_over_all_on_every_inner_state():
    p, plan = fixture("twoact")
    proofs = encode_proofs(p, plan)
    i, j = (plan.position[n] for n in plan.instances[("a2", 0)])
    for k in range(i, j):
        # over-all r >= 0 on state k: making r negative there breaks the proofs
        assert not is_valid(implies(le(S(k, "r"), -1), proofs))


def test_infeasible_stn_gives_false():
    p, plan = fixture("unit")
    bad = dataclasses.replace(plan, constraints=plan.constraints
                              + (StnConstraint("t2", "t0", L.const(-1)),))  # t2 <= -1
    assert not is_sat(build_enc_valid(p, bad)).sat


def test_battery_effect_uses_rate():
    p, plan = fixture("delivery_s_battery")
    eff = encode_eff(p, plan)
    start, end = plan.instances[("base1_o1", 0)]
    k = plan.position[end]
    rate = L.var("rate_base1_o1_battery")
    assert is_valid(implies(eff, eq(S(k, "battery"), S(k - 1, "battery") - rate)))


def test_frame_axioms():
    for name in ("unit", "twoact", "delivery_s_battery"):
        p, plan = fixture(name)
        eff = encode_eff(p, plan)
        for k, tp in enumerate(plan.order):
            if k == 0:
                continue
            _, writes = footprint(p, plan, tp)
            for f in p.fluent_map:
                if f not in writes:
                    assert is_valid(implies(eff, eq(S(k, f), S(k - 1, f)))), (name, tp, f)


def _oracle_agreement(name, valuation):
    p, plan = fixture(name)
    enc = encode(p, plan)
    inside = evaluate(bind_params(enc.enc_valid, valuation), {})
    full = is_sat(bind_params(conj(enc.enc_tn, enc.enc_eff, enc.enc_proofs), valuation))
    if full.sat:
        sched = enc.schedule(full.model)
        assert validate_concrete(p, plan, valuation, sched)
        assert inside
    else:
        sched = nominal_schedule(p, plan, valuation)
        assert sched is None or not validate_concrete(p, plan, valuation, sched)
    # enc_valid is the projection of the schedulability part
    assert inside == is_sat(bind_params(conj(enc.enc_tn, enc.enc_eff), valuation)).sat


rationals = st.fractions(min_value=0, max_value=25, max_denominator=4)


@settings(max_examples=80, deadline=None)
@given(rationals)
def test_oracle_agreement_unit(gv):
    _oracle_agreement("unit", {"g": gv})


@settings(max_examples=80, deadline=None)
@given(rationals, rationals)
def test_oracle_agreement_twoact(a, b):
    _oracle_agreement("twoact", {"g1": a, "g2": b})


def test_nominal_inside_everywhere(encodings):
    for name, enc in encodings.items():
        assert evaluate(bind_params(enc.enc_valid, enc.nominal), {}), name
