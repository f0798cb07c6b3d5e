"""Seeded stochastic environment: true action durations and consumption rates."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..model.expr import to_fraction

RESOLUTION = 1000  # sampled values are rounded to 1/RESOLUTION


@dataclass(frozen=True)
class Dist:
    """Normal distribution truncated from below at ``minimum``."""

    mean: float
    stddev: float = 0.0
    minimum: float = 0.0

    def sample(self, rng: random.Random) -> Fraction:
        x = self.mean if self.stddev <= 0 else rng.gauss(self.mean, self.stddev)
        x = max(x, self.minimum)
        return Fraction(round(x * RESOLUTION), RESOLUTION)

    def to_json(self) -> dict:
        return {"mean": self.mean, "stddev": self.stddev, "minimum": self.minimum}

    @staticmethod
    def from_json(d) -> "Dist":
        if isinstance(d, (int, float)):
            return Dist(float(d))
        return Dist(float(d["mean"]), float(d.get("stddev", 0.0)), float(d.get("minimum", 0.0)))


@dataclass(frozen=True)
class EnvironmentModel:
    """Durations keyed by action name, rates keyed by ``"<action>:<fluent>"``.

    Every draw is made from its own generator seeded by (seed, episode, what,
    occurrence), so different executors facing the same episode see the same
    world (common random numbers) regardless of how many draws they make.
    """

    durations: dict = field(default_factory=dict)
    rates: dict = field(default_factory=dict)
    seed: int = 0

    def _rng(self, episode, kind, key, occurrence) -> random.Random:
        return random.Random(f"{self.seed}|{episode}|{kind}|{key}|{occurrence}")

    def duration(self, episode, action: str, occurrence: int, nominal) -> Fraction:
        d = self.durations.get(action)
        if d is None:
            return to_fraction(nominal)
        return d.sample(self._rng(episode, "dur", action, occurrence))

    def rate(self, episode, action: str, fluent: str, occurrence: int, nominal) -> Fraction:
        d = self.rates.get(f"{action}:{fluent}")
        if d is None:
            return to_fraction(nominal)
        return d.sample(self._rng(episode, "rate", f"{action}:{fluent}", occurrence))

    def with_seed(self, seed: int) -> "EnvironmentModel":
        return EnvironmentModel(self.durations, self.rates, seed)

    def to_json(self) -> dict:
        return {"seed": self.seed,
                "durations": {k: v.to_json() for k, v in self.durations.items()},
                "rates": {k: v.to_json() for k, v in self.rates.items()}}

    @staticmethod
    def from_json(d) -> "EnvironmentModel":
        return EnvironmentModel(
            {k: Dist.from_json(v) for k, v in d.get("durations", {}).items()},
            {k: Dist.from_json(v) for k, v in d.get("rates", {}).items()},
            int(d.get("seed", 0)),
        )


__all__ = ["Dist", "EnvironmentModel", "RESOLUTION"]
