"""Planning fragment: parametrized problems and parametrized STN plans."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from .expr import Condition, LinearExpression, to_fraction

DEFAULT_EPSILON = Fraction(1, 1000)


class ModelError(Exception):
    """Base class for problem/plan construction errors."""


class ParseError(ModelError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class UndeclaredSymbol(ModelError):
    pass


class InvalidProblem(ModelError):
    pass


class InconsistentPlan(ModelError):
    pass


class IncompletePlan(ModelError):
    pass


@dataclass(frozen=True)
class Parameter:
    name: str
    nominal: Fraction
    weight: Fraction = Fraction(1)


@dataclass(frozen=True)
class Fluent:
    name: str
    init: LinearExpression = LinearExpression()
    boolean: bool = False


@dataclass(frozen=True)
class Effect:
    fluent: str
    expr: LinearExpression


@dataclass(frozen=True)
class DurativeAction:
    name: str
    at_start: tuple = ()
    over_all: tuple = ()
    at_end: tuple = ()
    start_effects: tuple = ()
    end_effects: tuple = ()

    def conditions(self):
        """Yield ``(kind, condition)`` pairs."""
        for kind in ("at_start", "over_all", "at_end"):
            for c in getattr(self, kind):
                yield kind, c

    def effects(self, when: str) -> tuple:
        return self.start_effects if when == "start" else self.end_effects


@dataclass(frozen=True)
class Goal:
    condition: Condition
    deadline: Fraction | None = None


@dataclass(frozen=True)
class ParametrizedProblem:
    name: str
    fluents: tuple
    actions: tuple
    goals: tuple
    params: tuple = ()
    constants: tuple = ()  # (name, Fraction) pairs
    epsilon: Fraction = DEFAULT_EPSILON

    @cached_property
    def fluent_map(self) -> dict:
        return {f.name: f for f in self.fluents}

    @cached_property
    def action_map(self) -> dict:
        return {a.name: a for a in self.actions}

    @cached_property
    def param_map(self) -> dict:
        return {p.name: p for p in self.params}

    @cached_property
    def constant_map(self) -> dict:
        return dict(self.constants)

    @property
    def param_names(self) -> tuple:
        return tuple(p.name for p in self.params)

    def nominal_valuation(self) -> dict:
        return {p.name: p.nominal for p in self.params}

    def with_params(self, params) -> "ParametrizedProblem":
        return ParametrizedProblem(self.name, self.fluents, self.actions, self.goals,
                                   tuple(params), self.constants, self.epsilon)


PLAN_START = "plan-start"
START = "start"
END = "end"


@dataclass(frozen=True)
class TimePoint:
    name: str
    kind: str
    action: str | None = None
    instance: int | None = None

    @property
    def key(self):
        return (self.action, self.instance)


@dataclass(frozen=True)
class StnConstraint:
    """``t_i - t_j <= bound`` where bound is a rational or +/- one parameter."""

    ti: str
    tj: str
    bound: LinearExpression

    @property
    def param(self) -> str | None:
        if self.bound.terms:
            return self.bound.terms[0][0]
        return None

    def bound_value(self, valuation: Mapping[str, object]) -> Fraction:
        return self.bound.evaluate(valuation)


def make_bound(value) -> LinearExpression:
    if isinstance(value, LinearExpression):
        b = value
    elif isinstance(value, str) and value.lstrip("-").isidentifier():
        b = LinearExpression.var(value.lstrip("-"), -1 if value.startswith("-") else 1)
    else:
        b = LinearExpression.const(to_fraction(value))
    if b.terms and (len(b.terms) > 1 or b.constant or abs(b.terms[0][1]) != 1):
        raise InvalidProblem(f"STN bound must be a rational or +/- one parameter, got {b}")
    return b


@dataclass(frozen=True)
class ParametrizedSTNPlan:
    timepoints: tuple
    constraints: tuple
    order: tuple
    name: str = "plan"

    @cached_property
    def tp_map(self) -> dict:
        return {t.name: t for t in self.timepoints}

    @cached_property
    def position(self) -> dict:
        return {n: i for i, n in enumerate(self.order)}

    @property
    def plan_start(self) -> str:
        for t in self.timepoints:
            if t.kind == PLAN_START:
                return t.name
        raise IncompletePlan("plan has no plan-start timepoint")

    @cached_property
    def instances(self) -> dict:
        """(action, instance) -> (start timepoint name, end timepoint name)."""
        out: dict = {}
        for t in self.timepoints:
            if t.kind == PLAN_START:
                continue
            s, e = out.get(t.key, (None, None))
            if t.kind == START:
                s = t.name
            else:
                e = t.name
            out[t.key] = (s, e)
        return out

    def happening(self, name: str) -> TimePoint:
        return self.tp_map[name]

    def partner(self, name: str) -> str:
        t = self.tp_map[name]
        s, e = self.instances[t.key]
        return e if t.kind == START else s


@dataclass(frozen=True)
class TimedAction:
    """One entry of a time-triggered plan."""

    start: Fraction
    action: str
    duration: Fraction


@dataclass(frozen=True)
class TimeTriggeredPlan:
    actions: tuple = field(default_factory=tuple)
