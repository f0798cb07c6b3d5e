"""Replanning campaigns: DREEx against fixed-slack baselines.

Each episode loops replanner -> parametrize -> (IRR for DREEx) -> dispatch
until an order is delivered within its deadline, the replanner gives up, or
the world reaches an unrecoverable state.  Every replanning costs
``replan_time`` simulated seconds before the next plan can start.
"""
from __future__ import annotations

import csv
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ..encoder import encode
from ..irr import run_irr
from ..model.expr import format_fraction, to_fraction
from ..model.parametrize import parametrize
from ..model.parser import print_problem, print_tt_plan
from .environment import EnvironmentModel
from .executor import FAILURE, DREEx, dispatch, parse_policy
from .scenarios import get_scenario


class ConfigError(ValueError):
    pass


@dataclass
class CampaignConfig:
    name: str
    scenario: str
    instances: list  # [{"name": str, "deadlines": {order: seconds}}]
    policies: list
    seed: int = 42
    episodes: int = 5
    replan_time: Fraction = Fraction(60)
    beta: Fraction = Fraction(1)
    initial_step: Fraction | None = None
    irr_budget_steps: int | None = 400
    stddev_ratio: Fraction | None = None
    environment: dict | None = None
    max_replans: int = 30

    @staticmethod
    def from_json(d) -> "CampaignConfig":
        if not isinstance(d, dict):
            raise ConfigError("campaign config must be a JSON object")
        known = {"name", "scenario", "instances", "policies", "seed", "episodes", "replan_time",
                 "irr", "stddev_ratio", "environment", "max_replans", "description"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        for k in ("scenario", "instances", "policies"):
            if k not in d:
                raise ConfigError(f"missing config key {k!r}")
        try:
            get_scenario(d["scenario"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        policies = list(d["policies"])
        if not policies:
            raise ConfigError("no policies given")
        for p in policies:
            try:
                parse_policy(p)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if len(set(policies)) != len(policies):
            raise ConfigError("duplicate policy")
        instances = d["instances"]
        if not isinstance(instances, list) or not instances:
            raise ConfigError("instances must be a nonempty list")
        for inst in instances:
            if not isinstance(inst, dict) or "deadlines" not in inst or "name" not in inst:
                raise ConfigError("each instance needs a name and deadlines")
        irr = d.get("irr", {})
        try:
            cfg = CampaignConfig(
                name=str(d.get("name", d["scenario"])),
                scenario=d["scenario"],
                instances=instances,
                policies=policies,
                seed=int(d.get("seed", 42)),
                episodes=int(d.get("episodes", 5)),
                replan_time=to_fraction(d.get("replan_time", 60)),
                beta=to_fraction(irr.get("beta", 1)),
                initial_step=(to_fraction(irr["initial_step"]) if irr.get("initial_step") is not None
                              else None),
                irr_budget_steps=irr.get("budget_steps", 400),
                stddev_ratio=(to_fraction(d["stddev_ratio"]) if d.get("stddev_ratio") is not None
                              else None),
                environment=d.get("environment"),
                max_replans=int(d.get("max_replans", 30)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config value: {exc}") from None
        if cfg.beta <= 0 or cfg.episodes <= 0 or cfg.replan_time < 0:
            raise ConfigError("beta and episodes must be positive, replan_time nonnegative")
        return cfg

    @staticmethod
    def load(path) -> "CampaignConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        return CampaignConfig.from_json(doc)

    def env(self) -> EnvironmentModel:
        if self.environment is not None:
            return EnvironmentModel.from_json({**self.environment, "seed": self.seed})
        return get_scenario(self.scenario).environment(self.seed, self.stddev_ratio)


@dataclass
class EpisodeResult:
    instance: str
    episode: int
    policy: str
    success: bool
    replans: int
    reason: str
    dispatches: list = field(default_factory=list)
    guarantee_ok: bool = True

    def to_json(self) -> dict:
        return {"instance": self.instance, "episode": self.episode, "policy": self.policy,
                "success": self.success, "replans": self.replans, "reason": self.reason,
                "guarantee_ok": self.guarantee_ok, "dispatches": self.dispatches}


class IRRCache:
    """Envelopes keyed by the exact parametrized problem and plan text."""

    def __init__(self, beta, initial_step, budget_steps):
        self.beta = beta
        self.initial_step = initial_step
        self.budget_steps = budget_steps
        self.store: dict = {}

    def __call__(self, problem, plan, tt_key):
        key = (print_problem(problem), tt_key)
        hit = self.store.get(key)
        if hit is None:
            omega = None
            if self.initial_step is not None:
                omega = {p.name: (self.initial_step / p.nominal if p.nominal else Fraction(1))
                         for p in problem.params}
            res = run_irr(encode(problem, plan), self.beta, omega, budget_steps=self.budget_steps)
            hit = res.dre
            self.store[key] = hit
        return hit


def _delivered_in_time(state, last_write, offset, deadlines) -> bool:
    for o, d in deadlines.items():
        f = f"delivered_{o}"
        if state.get(f) and f in last_write and offset + last_write[f] <= to_fraction(d):
            return True
    return False


def run_episode(cfg: CampaignConfig, instance: dict, episode: int, policy_name: str,
                env: EnvironmentModel, cache: IRRCache) -> EpisodeResult:
    scenario = get_scenario(cfg.scenario)
    deadlines = {o: to_fraction(v) for o, v in instance["deadlines"].items()}
    state = scenario.initial_state()
    now = Fraction(0)
    occurrences: Counter = Counter()
    replans = 0
    dispatches = []
    guarantee_ok = True
    ep_key = f"{instance['name']}/{episode}"
    base = parse_policy(policy_name)
    while True:
        try:
            planned = scenario.replan(state, now, deadlines)
        except Exception as exc:  # replanner crashes count as failed episodes
            return EpisodeResult(instance["name"], episode, policy_name, False, replans,
                                 f"replanner error: {exc}", dispatches, guarantee_ok)
        if planned is None:
            return EpisodeResult(instance["name"], episode, policy_name, False, replans,
                                 "no plan meets any deadline", dispatches, guarantee_ok)
        problem, tt, order = planned
        pp, pl = parametrize(problem, tt, scenario.directives(tt))
        if base == "DREEx":
            policy = DREEx(cache(pp, pl, print_tt_plan(tt)))
        else:
            policy = base
        trace = dispatch(pp, pl, policy, env, ep_key, occurrences, state)
        info = trace.to_json()
        info.update({"plan_start": format_fraction(now), "order": order,
                     "policy_bounds": {k: [format_fraction(a), format_fraction(b)]
                                       for k, (a, b) in policy.bounds(pp).items()}})
        dispatches.append(info)
        if isinstance(policy, DREEx) and trace.in_envelope and trace.outcome != FAILURE:
            if trace.reason in ("plan completed", "plan completed without achieving the goals"):
                guarantee_ok = guarantee_ok and trace.outcome == "success"
        if _delivered_in_time(trace.state, trace.last_write, now, deadlines):
            return EpisodeResult(instance["name"], episode, policy_name, True, replans,
                                 "delivered", dispatches, guarantee_ok)
        if trace.outcome == FAILURE:
            return EpisodeResult(instance["name"], episode, policy_name, False, replans,
                                 trace.reason, dispatches, guarantee_ok)
        replans += 1
        if replans > cfg.max_replans:
            return EpisodeResult(instance["name"], episode, policy_name, False, replans,
                                 "replan limit reached", dispatches, guarantee_ok)
        state = trace.state
        now = now + max(trace.end_time + cfg.replan_time, trace.resume_time)


def _task(args):
    cfg, inst_idx, episode = args
    env = cfg.env()
    cache = IRRCache(cfg.beta, cfg.initial_step, cfg.irr_budget_steps)
    inst = cfg.instances[inst_idx]
    return [run_episode(cfg, inst, episode, p, env, cache) for p in cfg.policies]


@dataclass
class CampaignResult:
    config: CampaignConfig
    episodes: list

    def rows(self) -> list:
        out = []
        for p in self.config.policies:
            eps = [e for e in self.episodes if e.policy == p]
            ok = [e for e in eps if e.success]
            cov = 100.0 * len(ok) / len(eps) if eps else 0.0
            avg = sum(e.replans for e in ok) / len(ok) if ok else math.nan
            out.append({"instance": self.config.name, "policy": p, "coverage": round(cov, 1),
                        "avg_replans": round(avg, 2) if ok else None, "episodes": len(eps)})
        return out

    def coverage(self, policy) -> float:
        return next(r["coverage"] for r in self.rows() if r["policy"] == policy)

    def avg_replans(self, policy):
        return next(r["avg_replans"] for r in self.rows() if r["policy"] == policy)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["instance", "policy", "coverage", "avg_replans"])
            for r in self.rows():
                w.writerow([r["instance"], r["policy"], f"{r['coverage']:.1f}",
                            "NA" if r["avg_replans"] is None else f"{r['avg_replans']:.2f}"])

    def write_traces(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for e in self.episodes:
                fh.write(json.dumps(e.to_json(), sort_keys=True) + "\n")

    def table(self) -> str:
        lines = [f"{'Executor':<10} {'Coverage':>9} {'Avg Replans':>12}"]
        for r in self.rows():
            avg = "NA" if r["avg_replans"] is None else f"{r['avg_replans']:.1f}"
            lines.append(f"{r['policy']:<10} {r['coverage']:>8.1f}% {avg:>12}")
        return "\n".join(lines)


def simulate_campaign(cfg: CampaignConfig, jobs: int = 1) -> CampaignResult:
    tasks = [(cfg, i, ep) for i in range(len(cfg.instances)) for ep in range(cfg.episodes)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_task, tasks))
    else:
        chunks = [_task(t) for t in tasks]
    episodes = [e for chunk in chunks for e in chunk]
    return CampaignResult(cfg, episodes)


__all__ = ["CampaignConfig", "CampaignResult", "ConfigError", "EpisodeResult", "IRRCache",
           "run_episode", "simulate_campaign"]
