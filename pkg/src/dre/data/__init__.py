"""Bundled fixtures: UNIT, TWOACT, DELIVERY-S and its battery variant.

Every fixture ships as a non-parametric problem (``<name>_base.problem``), a
time-triggered plan (``<name>.tt``) and parametrization directives
(``<name>.directives``).  UNIT and TWOACT also ship their parametrized
problem text.
"""
from __future__ import annotations

from pathlib import Path

from ..model.parametrize import parametrize
from ..model.parser import parse_problem, parse_tt_plan

DATA = Path(__file__).resolve().parent
FIXTURES = ("unit", "twoact", "delivery_s", "delivery_s_battery")
CAMPAIGNS = {"delivery-s": "delivery_s_campaign.json",
             "delivery-s-battery": "delivery_s_battery_campaign.json",
             "delivery-s-stddev0": "delivery_s_stddev0_campaign.json"}


def path(filename: str) -> Path:
    p = DATA / filename
    if not p.exists():
        raise FileNotFoundError(f"no bundled file {filename!r}")
    return p


def read(filename: str) -> str:
    return path(filename).read_text(encoding="utf-8")


def directives(name: str) -> list:
    return [ln.strip() for ln in read(f"{name}.directives").splitlines() if ln.strip()]


def fixture(name: str):
    """``(parametrized_problem, parametrized_stn_plan)`` for a bundled fixture."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    base = parse_problem(read(f"{name}_base.problem"))
    return parametrize(base, parse_tt_plan(read(f"{name}.tt")), directives(name))


def campaign_path(name: str) -> Path:
    return path(CAMPAIGNS[name])


__all__ = ["CAMPAIGNS", "DATA", "FIXTURES", "campaign_path", "directives", "fixture", "path", "read"]
