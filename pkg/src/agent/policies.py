"""
Scheduling policies as seen by the simulator.

A policy exposes `select(ages, queues, packet_ages, rng)` over plain
lists (the episode loop's representation) and `decide(state, rng)`
over a SchedulerState.
"""

from typing import Optional, Protocol

from src.agent.baselines import GreedyMaxAgePolicy, StationaryRandomPolicy
from src.agent.dpp import best_candidate
from src.models.action import Action, CandidateAction, CandidateKind
from src.models.params import (
    DppConfig,
    GreedyMaxAgeConfig,
    PolicyConfig,
    StationaryPolicy,
    UserParams,
)
from src.models.state import SchedulerState
from src.system.rng import SlotRng


class Policy(Protocol):
    name: str

    def select(
        self,
        ages: list[int],
        queues: list[float],
        packet_ages: list[Optional[int]],
        rng: SlotRng,
    ) -> tuple[CandidateKind, Optional[int]]:
        ...


class DppPolicy:
    """Drift-plus-penalty with fixed penalty weight."""

    name = "dpp"

    def __init__(self, params: list[UserParams], config: DppConfig):
        self.params = params
        self.config = config
        self._p = [u.p for u in params]
        self._c_sample = [u.c_sample for u in params]
        self._c_transmit = [u.c_transmit for u in params]

    def select(
        self,
        ages: list[int],
        queues: list[float],
        packet_ages: list[Optional[int]],
        rng: SlotRng,
    ) -> tuple[CandidateKind, Optional[int]]:
        kind, user, _ = best_candidate(
            ages, queues, packet_ages,
            self._p, self._c_sample, self._c_transmit, self.config.v,
        )
        return kind, user


def decide(policy: Policy, state: SchedulerState, rng: SlotRng) -> Action:
    """Run a policy on a SchedulerState and return the joint action."""
    kind, user = policy.select(state.ages, state.queues, state.packet_ages, rng)
    return CandidateAction(kind, user, 0.0).to_action(state.n_users)


def build_policy(config: PolicyConfig, params: list[UserParams]) -> Policy:
    """Instantiate the policy named by a config."""
    if isinstance(config, DppConfig):
        return DppPolicy(params, config)
    if isinstance(config, GreedyMaxAgeConfig):
        return GreedyMaxAgePolicy(params)
    if isinstance(config, StationaryPolicy):
        return StationaryRandomPolicy(params, config)
    raise ValueError(f"Unknown policy config: {config!r}")
