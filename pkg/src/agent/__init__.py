"""Scheduling policies and virtual queues."""

from src.agent.baselines import (
    GreedyMaxAgePolicy,
    StationaryRandomPolicy,
    greedy_max_age_policy,
)
from src.agent.dpp import (
    action_delta,
    best_candidate,
    choose_action,
    drift_penalty_objective,
    rank_candidates,
)
from src.agent.policies import DppPolicy, Policy, build_policy, decide
from src.agent.queues import drift_bound_b, update_virtual_queues

__all__ = [
    "DppPolicy",
    "GreedyMaxAgePolicy",
    "Policy",
    "StationaryRandomPolicy",
    "action_delta",
    "best_candidate",
    "build_policy",
    "choose_action",
    "decide",
    "drift_bound_b",
    "drift_penalty_objective",
    "greedy_max_age_policy",
    "rank_candidates",
    "update_virtual_queues",
]
