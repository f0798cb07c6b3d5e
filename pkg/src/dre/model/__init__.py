"""Restricted numeric temporal planning fragment, STN plans and the concrete oracle."""
from .expr import Condition, LinearExpression, format_fraction, to_fraction
from .parametrize import Directive, DirectiveError, parametrize, parse_directive
from .parser import (
    looks_like_tt_plan,
    parse_condition,
    parse_expression,
    parse_plan,
    parse_problem,
    parse_tt_plan,
    plan_from_json,
    plan_to_json,
    print_plan,
    print_problem,
    print_tt_plan,
    problem_from_json,
    problem_to_json,
)
from .problem import (
    DEFAULT_EPSILON,
    END,
    PLAN_START,
    START,
    DurativeAction,
    Effect,
    Fluent,
    Goal,
    IncompletePlan,
    InconsistentPlan,
    InvalidProblem,
    ModelError,
    Parameter,
    ParametrizedProblem,
    ParametrizedSTNPlan,
    ParseError,
    StnConstraint,
    TimedAction,
    TimePoint,
    TimeTriggeredPlan,
    UndeclaredSymbol,
)
from .validate import check_plan, nominal_schedule, validate_concrete
