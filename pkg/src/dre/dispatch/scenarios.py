"""DELIVERY-S: a one-robot, two-order delivery domain with deadlines.

An order is fetched, built in three base stages and delivered.  Holding an
order blocks fetching another one; dropping it costs a 10 s disposal.  The
battery variant adds a charge level that every action checks at its start and
draws down at its end, plus a recharge action.

The bundled replanner is deliberately naive: from the current world state it
picks, among the orders whose nominal completion still meets the deadline,
the one finishing first, and emits a sequential time-triggered plan.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..model.expr import format_fraction, to_fraction
from ..model.parser import parse_problem
from ..model.problem import TimedAction, TimeTriggeredPlan
from .environment import Dist, EnvironmentModel

ORDERS = ("o1", "o2")
STAGE_ACTIONS = ("base1", "base2", "base3")
SIGMA_RATIO = Fraction(70, 170)
RATE_SIGMA_RATIO = Fraction(3, 10)


@dataclass(frozen=True)
class DeliveryScenario:
    battery: bool = False
    durations: dict = field(default_factory=lambda: {
        "fetch": 30, "base1": 120, "base2": 145, "base3": 170, "deliver": 20, "dispose": 10,
        "recharge": 60})
    consumption: dict = field(default_factory=lambda: {
        "fetch": 4, "base1": 8, "base2": 10, "base3": 12, "deliver": 3, "dispose": 1})
    capacity: int = 100
    recharge_margin: Fraction = Fraction(1)
    epsilon: Fraction = Fraction(1, 1000)

    @property
    def name(self) -> str:
        return "DELIVERY-S-battery" if self.battery else "DELIVERY-S"

    # -- problem text ---------------------------------------------------------
    def initial_state(self) -> dict:
        s = {}
        for o in ORDERS:
            s[f"stage_{o}"] = Fraction(0)
            s[f"holding_{o}"] = Fraction(0)
            s[f"delivered_{o}"] = Fraction(0)
        if self.battery:
            s["battery"] = Fraction(self.capacity)
        return s

    def problem_text(self, state: dict, goal_order: str, deadline) -> str:
        lines = [f"problem delivery_s{'_battery' if self.battery else ''}",
                 f"epsilon {format_fraction(self.epsilon)}"]
        for o in ORDERS:
            lines.append(f"fluent stage_{o} = {format_fraction(state[f'stage_{o}'])}")
            lines.append(f"bool holding_{o} = {'true' if state[f'holding_{o}'] else 'false'}")
            lines.append(f"bool delivered_{o} = {'true' if state[f'delivered_{o}'] else 'false'}")
        if self.battery:
            lines.append(f"fluent battery = {format_fraction(state['battery'])}")
            lines.append(f"const capacity {self.capacity}")
            for o in ORDERS:
                for a in ("fetch",) + STAGE_ACTIONS + ("deliver", "dispose"):
                    lines.append(f"const c_{a}_{o} {self.consumption[a]}")
        for o in ORDERS:
            lines += self._order_actions(o)
        if self.battery:
            lines += ["action recharge",
                      "  at-start battery <= capacity",
                      "  effect at-end battery := capacity",
                      "end"]
        lines.append(f"goal delivered_{goal_order} >= 1 deadline {format_fraction(to_fraction(deadline))}")
        return "\n".join(lines) + "\n"

    def _battery(self, a, o):
        if not self.battery:
            return []
        return [f"  at-start battery >= c_{a}_{o}",
                f"  effect at-end battery := battery - c_{a}_{o}"]

    def _order_actions(self, o) -> list:
        out = [f"action fetch_{o}",
               "  at-start " + " + ".join(f"holding_{x}" for x in ORDERS) + " <= 0",
               f"  at-start stage_{o} = 0",
               f"  effect at-start holding_{o} := true",
               f"  effect at-end stage_{o} := 1"]
        out += self._battery("fetch", o) + ["end"]
        for k, a in enumerate(STAGE_ACTIONS, start=1):
            out += [f"action {a}_{o}",
                    f"  at-start stage_{o} = {k}",
                    f"  effect at-end stage_{o} := {k + 1}"]
            out += self._battery(a, o) + ["end"]
        out += [f"action deliver_{o}",
                f"  at-start stage_{o} = 4",
                f"  effect at-end delivered_{o} := true",
                f"  effect at-end holding_{o} := false",
                f"  effect at-end stage_{o} := 5"]
        out += self._battery("deliver", o) + ["end"]
        out += [f"action dispose_{o}",
                f"  at-start holding_{o}",
                f"  at-start stage_{o} <= 4",
                f"  effect at-end stage_{o} := 0",
                f"  effect at-end holding_{o} := false"]
        out += self._battery("dispose", o) + ["end"]
        return out

    # -- planning -------------------------------------------------------------
    def steps_for(self, state: dict, o: str) -> list:
        """Action names (without order suffix handling) bringing ``o`` to delivery."""
        steps = []
        for other in ORDERS:
            if other != o and state[f"holding_{other}"] and state[f"stage_{other}"] <= 4:
                steps.append(f"dispose_{other}")
        stage = int(state[f"stage_{o}"])
        holding = bool(state[f"holding_{o}"])
        if holding and stage == 0:
            steps.append(f"dispose_{o}")
            holding = False
        if not holding:
            steps.append(f"fetch_{o}")
            stage = 1
        steps += [f"{a}_{o}" for a in STAGE_ACTIONS[stage - 1:]]
        steps.append(f"deliver_{o}")
        if self.battery:
            need = sum(self.consumption[s.rsplit("_", 1)[0]] for s in steps)
            if state["battery"] < self.recharge_margin * need:
                steps.insert(0, "recharge")
        return steps

    def duration_of(self, action: str) -> Fraction:
        return Fraction(self.durations[action.rsplit("_", 1)[0] if action != "recharge" else action])

    def tt_plan(self, steps) -> TimeTriggeredPlan:
        t = Fraction(0)
        out = []
        for s in steps:
            d = self.duration_of(s)
            out.append(TimedAction(t, s, d))
            t += d + self.epsilon
        return TimeTriggeredPlan(tuple(out))

    def nominal_length(self, steps) -> Fraction:
        tt = self.tt_plan(steps)
        last = tt.actions[-1]
        return last.start + last.duration

    def replan(self, state: dict, now, deadlines: dict):
        """``(problem, tt_plan, order)`` for the quickest order still reachable, or None."""
        now = to_fraction(now)
        best = None
        for o in ORDERS:
            if state[f"delivered_{o}"] or o not in deadlines:
                continue
            steps = self.steps_for(state, o)
            length = self.nominal_length(steps)
            if now + length > to_fraction(deadlines[o]):
                continue
            if best is None or length < best[0]:
                best = (length, o, steps)
        if best is None:
            return None
        _, o, steps = best
        rel = to_fraction(deadlines[o]) - now
        problem = parse_problem(self.problem_text(state, o, rel))
        return problem, self.tt_plan(steps), o

    def directives(self, tt: TimeTriggeredPlan) -> list:
        names = [a.action for a in tt.actions]
        if self.battery:
            return [f"rate {a} battery" for a in names if a != "recharge"]
        return [f"duration {a}" for a in names if a.rsplit("_", 1)[0] in ("fetch",) + STAGE_ACTIONS]

    def environment(self, seed: int = 0, stddev_ratio=None) -> EnvironmentModel:
        """Random fetch/base durations, or random consumption in the battery variant.

        ``stddev_ratio`` is sigma over mean; it defaults to 70/170 for
        durations and 3/10 for consumption.
        """
        durs, rates = {}, {}
        for o in ORDERS:
            if self.battery:
                ratio = RATE_SIGMA_RATIO if stddev_ratio is None else to_fraction(stddev_ratio)
                for a in ("fetch",) + STAGE_ACTIONS + ("deliver", "dispose"):
                    c = self.consumption[a]
                    rates[f"{a}_{o}:battery"] = Dist(float(c), float(c * ratio), c / 4)
            else:
                ratio = SIGMA_RATIO if stddev_ratio is None else to_fraction(stddev_ratio)
                for a in ("fetch",) + STAGE_ACTIONS:
                    m = self.durations[a]
                    durs[f"{a}_{o}"] = Dist(float(m), float(m * ratio), m / 4)
        return EnvironmentModel(durs, rates, seed)


def delivery(battery: bool = False, **kw) -> DeliveryScenario:
    return DeliveryScenario(battery=battery, **kw)


SCENARIOS = {"delivery-s": lambda: DeliveryScenario(False),
             "delivery-s-battery": lambda: DeliveryScenario(True)}


def get_scenario(name: str) -> DeliveryScenario:
    try:
        return SCENARIOS[name]()
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; known: {', '.join(SCENARIOS)}") from None


__all__ = ["DeliveryScenario", "ORDERS", "SCENARIOS", "delivery", "get_scenario"]
