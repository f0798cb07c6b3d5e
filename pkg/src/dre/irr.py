"""Incremental Rectangular-Robustification: anytime growth of a decoupled envelope.

Start from the nominal point, try to push one bound of one parameter outward by
its step size, keep the candidate when it is still inside the robustness
envelope, otherwise drop that direction; when both directions of a parameter
fail its step is halved.  The run ends once every step is below ``beta``.
"""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .encoder import PlanEncoding
from .lra import Prepared, ResourceLimit, conj, is_sat, le, neg
from .lra.solver import DEFAULT_BUDGET
from .model.expr import format_fraction, to_fraction
from .model.problem import ModelError

log = logging.getLogger(__name__)

UB, LB = "UB", "LB"
ACCEPTED, REJECTED, HALVED, FIRST_WIDENING, DONE = (
    "accepted", "rejected", "halved", "first-widening", "done")


class InvalidNominal(ModelError):
    """The nominal point is not inside the envelope: the original plan is not valid."""


@dataclass(frozen=True)
class DRE:
    """Closed interval per parameter, in declaration order."""

    bounds: tuple  # ((name, lower, upper), ...)
    nominal: tuple = ()  # ((name, value), ...)

    @staticmethod
    def point(valuation: Mapping) -> "DRE":
        vals = tuple((k, to_fraction(v)) for k, v in valuation.items())
        return DRE(tuple((k, v, v) for k, v in vals), vals)

    def __getitem__(self, name):
        for n, lo, hi in self.bounds:
            if n == name:
                return lo, hi
        raise KeyError(name)

    @property
    def names(self) -> tuple:
        return tuple(n for n, _, _ in self.bounds)

    def as_dict(self) -> dict:
        return {n: (lo, hi) for n, lo, hi in self.bounds}

    def replace(self, name, lo, hi) -> "DRE":
        return DRE(tuple((n, lo, hi) if n == name else (n, a, b) for n, a, b in self.bounds),
                   self.nominal)

    def contains(self, valuation: Mapping) -> bool:
        return all(lo <= to_fraction(valuation[n]) <= hi for n, lo, hi in self.bounds)

    def subset_of(self, other: "DRE") -> bool:
        o = other.as_dict()
        return all(o[n][0] <= lo and hi <= o[n][1] for n, lo, hi in self.bounds)

    def total_width(self) -> Fraction:
        return sum((hi - lo for _, lo, hi in self.bounds), Fraction(0))

    def is_point(self) -> bool:
        return all(lo == hi for _, lo, hi in self.bounds)

    def formula(self):
        return conj(*[le(lo, n) & le(n, hi) for n, lo, hi in self.bounds])

    def to_json(self) -> list:
        nom = dict(self.nominal)
        out = []
        for n, lo, hi in self.bounds:
            d = {"name": n, "lower": format_fraction(lo), "upper": format_fraction(hi)}
            if n in nom:
                d["nominal"] = format_fraction(nom[n])
            out.append(d)
        return out

    @staticmethod
    def from_json(items) -> "DRE":
        bounds = tuple((d["name"], to_fraction(d["lower"]), to_fraction(d["upper"])) for d in items)
        nominal = tuple((d["name"], to_fraction(d["nominal"])) for d in items if "nominal" in d)
        return DRE(bounds, nominal)

    def __str__(self):
        return ", ".join(f"{n} in [{format_fraction(lo)}, {format_fraction(hi)}]"
                         for n, lo, hi in self.bounds)


class EnvelopeChecker:
    """The two quantifier-free checks deciding whether a rectangle is a valid DRE.

    Both base formulas are preprocessed once per encoding; each check then only
    adds the rectangle bounds.
    """

    def __init__(self, enc: PlanEncoding, budget: int | None = DEFAULT_BUDGET, backend=None):
        self.enc = enc
        self.budget = budget
        self.backend = backend  # optional external solver (SubprocessSolver)
        self.bases = (neg(enc.enc_valid), conj(enc.enc_tn, enc.enc_eff, neg(enc.enc_proofs)))
        self.prepared = tuple(Prepared(f) for f in self.bases) if backend is None else ()
        self.calls = 0

    def _checks(self, enc_R):
        if self.backend is None:
            for p in self.prepared:
                yield p.check(enc_R, self.budget)
        else:
            for f in self.bases:
                yield is_sat(conj(f, enc_R), self.budget, self.backend)

    def __call__(self, R: DRE) -> bool:
        self.calls += 1
        return not any(res.sat for res in self._checks(R.formula()))

    def counterexample(self, R: DRE):
        """A model witnessing that ``R`` is not inside the envelope, or None."""
        for res in self._checks(R.formula()):
            if res.sat:
                return res.model
        return None


def check_in_envelope(R: DRE, enc: PlanEncoding, budget: int | None = DEFAULT_BUDGET,
                      backend=None) -> bool:
    return EnvelopeChecker(enc, budget, backend)(R)


@dataclass(frozen=True)
class IRRSnapshot:
    step: int
    dre: DRE
    delta: tuple
    wallclock_ms: float
    event: str
    param: str | None = None
    direction: str | None = None

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "event": self.event,
            "param": self.param,
            "direction": self.direction,
            "wallclock_ms": round(self.wallclock_ms, 3),
            "bounds": self.dre.to_json(),
            "delta": {n: format_fraction(d) for n, d in self.delta},
        }

    @staticmethod
    def from_json(d) -> "IRRSnapshot":
        return IRRSnapshot(d["step"], DRE.from_json(d["bounds"]),
                           tuple((n, to_fraction(v)) for n, v in d["delta"].items()),
                           d.get("wallclock_ms", 0.0), d["event"], d.get("param"), d.get("direction"))


@dataclass
class IRRState:
    R: DRE
    delta: dict
    theta: dict
    beta: Fraction
    step_count: int = 0
    widened: bool = False
    last_picked: str | None = None


class RoundRobin:
    """Cycle through parameters in declaration order; upper bound before lower."""

    def pick_parameter(self, eligible, state: IRRState) -> str:
        names = list(state.delta)
        start = 0 if state.last_picked is None else names.index(state.last_picked) + 1
        for k in range(len(names)):
            n = names[(start + k) % len(names)]
            if n in eligible:
                return n
        raise ValueError("no eligible parameter")

    def pick_direction(self, theta) -> str:
        return UB if UB in theta else LB


@dataclass
class IRRResult:
    dre: DRE
    steps: int
    converged: bool
    first_widening_step: int | None
    snapshots: list = field(default_factory=list)
    wallclock_ms: float = 0.0
    unconverged: tuple = ()
    checks: int = 0
    warnings: list = field(default_factory=list)
    beta: Fraction = Fraction(1)
    omega: dict = field(default_factory=dict)

    @property
    def accepted(self) -> list:
        return [s.dre for s in self.snapshots if s.event in (ACCEPTED, FIRST_WIDENING)]

    def to_json(self) -> dict:
        return {
            "parameters": self.dre.to_json(),
            "run": {
                "beta": format_fraction(self.beta),
                "omega": {k: format_fraction(v) for k, v in self.omega.items()},
                "steps": self.steps,
                "first_widening_step": self.first_widening_step,
                "wallclock_ms": round(self.wallclock_ms, 3),
                "converged": self.converged,
                "unconverged": list(self.unconverged),
            },
        }


def run_irr(enc: PlanEncoding, beta=1, omega: Mapping | None = None,
            observer: Callable[[IRRSnapshot], None] | None = None,
            budget_steps: int | None = None, budget_seconds: float | None = None,
            strategy=None, solver_budget: int | None = DEFAULT_BUDGET,
            checker: EnvelopeChecker | None = None) -> IRRResult:
    """Grow a DRE around the nominal point of ``enc``.

    Every rectangle kept along the way passed the envelope check, so the
    returned DRE is valid even when a budget stops the loop early.
    """
    beta = to_fraction(beta)
    if beta <= 0:
        raise ValueError("beta must be positive")
    omega = {k: to_fraction(v) for k, v in (omega or {}).items()}
    weights = {p.name: p.weight for p in enc.problem.params}
    for k in omega:
        if k not in weights:
            raise ValueError(f"omega refers to unknown parameter {k!r}")
    w = {n: omega.get(n, weights[n]) for n in weights}
    if any(v <= 0 for v in w.values()):
        raise ValueError("omega weights must be positive")
    strategy = strategy or RoundRobin()
    check = checker or EnvelopeChecker(enc, solver_budget)
    t_start = time.perf_counter()
    snapshots: list = []
    warnings: list = []

    def ms():
        return (time.perf_counter() - t_start) * 1000.0

    nominal = enc.nominal
    R = DRE.point(nominal)
    state = IRRState(
        R,
        {n: max(nominal[n] * w[n], beta) for n in nominal},
        {n: {UB, LB} for n in nominal},
        beta,
    )

    def emit(event, param=None, direction=None):
        snap = IRRSnapshot(state.step_count, state.R, tuple(state.delta.items()), ms(), event,
                           param, direction)
        snapshots.append(snap)
        if observer is not None:
            observer(snap)

    try:
        ok = check(R)
    except ResourceLimit:
        ok = False
    if not ok:
        raise InvalidNominal("the nominal parameter point is not inside the robustness envelope")
    emit(ACCEPTED)
    first_widening = None

    while True:
        eligible = [n for n in state.delta if state.theta[n] and state.delta[n] >= beta]
        if not eligible:
            break
        if budget_steps is not None and state.step_count >= budget_steps:
            break
        if budget_seconds is not None and ms() / 1000.0 >= budget_seconds:
            break
        state.step_count += 1
        g = strategy.pick_parameter(eligible, state)
        state.last_picked = g
        theta = strategy.pick_direction(state.theta[g])
        lo, hi = state.R[g]
        d = state.delta[g]
        if theta == UB:
            cand_lo, cand_hi = lo, hi + d
        else:
            cand_lo, cand_hi = max(lo - d, Fraction(0)), hi
        if (cand_lo, cand_hi) == (lo, hi):
            # clamped at zero: nothing left to explore below
            ok = False
        else:
            cand = state.R.replace(g, cand_lo, cand_hi)
            try:
                ok = check(cand)
            except ResourceLimit as exc:
                msg = f"step {state.step_count}: solver budget hit on {g} {theta}, rejecting ({exc})"
                log.warning(msg)
                warnings.append(msg)
                ok = False
        if ok:
            state.R = cand
            if not state.widened and not cand.is_point():
                state.widened = True
                first_widening = state.step_count
                emit(FIRST_WIDENING, g, theta)
            else:
                emit(ACCEPTED, g, theta)
            continue
        state.theta[g].discard(theta)
        if not state.theta[g]:
            state.delta[g] = state.delta[g] / 2
            state.theta[g] = {UB, LB}
            emit(HALVED, g, theta)
        else:
            emit(REJECTED, g, theta)

    unconverged = tuple(n for n in state.delta if state.delta[n] >= beta)
    converged = not unconverged
    if unconverged:
        log.warning("IRR stopped by budget; unconverged parameters: %s", ", ".join(unconverged))
    emit(DONE)
    return IRRResult(state.R, state.step_count, converged, first_widening, snapshots, ms(),
                     unconverged, check.calls, warnings, beta, w)


def convergence(snapshots, final: DRE | None = None) -> list:
    """``(step, percentage)`` per accepted step: summed widths relative to the final ones."""
    accepted = [s for s in snapshots if s.event in (ACCEPTED, FIRST_WIDENING)]
    if final is None:
        final = accepted[-1].dre if accepted else None
    if final is None:
        return []
    names = set(final.names)
    total = final.total_width()
    out = []
    for s in accepted:
        if set(s.dre.names) != names:
            raise ValueError("snapshot parameters do not match the final DRE")
        pct = Fraction(100) if total == 0 else 100 * s.dre.total_width() / total
        out.append((s.step, pct))
    return out


def write_snapshots(snapshots, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in snapshots:
            fh.write(json.dumps(s.to_json()) + "\n")


def read_snapshots(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [IRRSnapshot.from_json(json.loads(line)) for line in fh if line.strip()]


__all__ = ["DRE", "IRRResult", "IRRSnapshot", "IRRState", "EnvelopeChecker", "InvalidNominal",
           "RoundRobin", "check_in_envelope", "convergence", "run_irr", "read_snapshots",
           "write_snapshots", "UB", "LB"]
