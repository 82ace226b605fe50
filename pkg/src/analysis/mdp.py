"""
Truncated single-user scheduling MDP.

State (A, P): the user's age and the age of its pending packet, P=None
when nothing is pending. Ages are clipped at `a_cap`; a pending packet
is always strictly younger than the age (1 <= P < A).

Actions: 0 idle, 1 sample-and-transmit, 2 retransmit. Each (state,
action) has at most two successors, stored as (next_state, prob) pairs
so transition expectations vectorize over the whole state space.
Retransmit from a state with nothing pending has infinite cost.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.models.params import UserParams

IDLE, SAMPLE, RETRANSMIT = 0, 1, 2
N_ACTIONS = 3

MdpState = tuple[int, Optional[int]]


@dataclass(frozen=True)
class TruncatedMdp:
    """Transition/cost arrays over the enumerated state space."""
    params: UserParams
    a_cap: int
    states: tuple[MdpState, ...]
    next_state: np.ndarray  # (S, 3, 2) successor indices
    prob: np.ndarray  # (S, 3, 2) successor probabilities
    cost: np.ndarray  # (S, 3) resource cost, inf where the action is unavailable
    age: np.ndarray  # (S,) age component of each state
    initial: int  # index of (1, None)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def index(self, state: MdpState) -> int:
        return self.states.index(state)

    def allowed_actions(self, s: int) -> tuple[int, ...]:
        return tuple(a for a in range(N_ACTIONS) if np.isfinite(self.cost[s, a]))


def enumerate_states(a_cap: int) -> list[MdpState]:
    """(A, None) followed by (A, 1..A-1) for each A = 1..a_cap."""
    states: list[MdpState] = []
    for a in range(1, a_cap + 1):
        states.append((a, None))
        states.extend((a, pk) for pk in range(1, a))
    return states


def build_truncated_mdp(params: UserParams, a_cap: int) -> TruncatedMdp:
    """Enumerate states and fill the transition and cost arrays."""
    if a_cap < 2:
        raise ValueError(f"a_cap must be at least 2, got {a_cap}")

    p = params.p
    states = enumerate_states(a_cap)
    lookup = {state: k for k, state in enumerate(states)}
    n = len(states)

    next_state = np.zeros((n, N_ACTIONS, 2), dtype=np.int64)
    prob = np.zeros((n, N_ACTIONS, 2))
    cost = np.full((n, N_ACTIONS), np.inf)
    age = np.array([a for a, _ in states], dtype=float)

    def grown(a: int, pk: Optional[int]) -> MdpState:
        """Age one slot without delivery; packet stays strictly younger than the age."""
        a_next = min(a + 1, a_cap)
        return a_next, None if pk is None else min(pk + 1, a_next - 1)

    for k, (a, pk) in enumerate(states):
        idle_next = lookup[grown(a, pk)]
        next_state[k, IDLE] = (idle_next, idle_next)
        prob[k, IDLE] = (1.0, 0.0)
        cost[k, IDLE] = 0.0

        next_state[k, SAMPLE] = (lookup[(1, None)], lookup[grown(a, 0)])
        prob[k, SAMPLE] = (p, 1.0 - p)
        cost[k, SAMPLE] = params.c_sample + params.c_transmit

        if pk is None:
            next_state[k, RETRANSMIT] = (k, k)
            prob[k, RETRANSMIT] = (1.0, 0.0)
        else:
            next_state[k, RETRANSMIT] = (lookup[(pk + 1, None)], lookup[grown(a, pk)])
            prob[k, RETRANSMIT] = (p, 1.0 - p)
            cost[k, RETRANSMIT] = params.c_transmit

    return TruncatedMdp(
        params=params,
        a_cap=a_cap,
        states=tuple(states),
        next_state=next_state,
        prob=prob,
        cost=cost,
        age=age,
        initial=lookup[(1, None)],
    )
