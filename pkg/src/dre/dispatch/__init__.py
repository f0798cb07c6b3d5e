"""STN dispatching, the stochastic world and replanning campaigns."""
from __future__ import annotations

from .campaign import CampaignConfig, CampaignResult, ConfigError, run_episode, simulate_campaign
from .environment import Dist, EnvironmentModel
from .executor import (FAILURE, REPLAN, SUCCESS, Baseline, DREEx, ExecutionTrace, base_graph,
                       dispatch, min_max_dispatch_time, param_sources, parse_policy)
from .scenarios import SCENARIOS, DeliveryScenario, get_scenario

__all__ = ["Baseline", "CampaignConfig", "CampaignResult", "ConfigError", "DREEx", "DeliveryScenario",
           "Dist", "EnvironmentModel", "ExecutionTrace", "FAILURE", "REPLAN", "SCENARIOS", "SUCCESS",
           "base_graph", "dispatch", "get_scenario", "min_max_dispatch_time", "param_sources",
           "parse_policy", "run_episode", "simulate_campaign"]
