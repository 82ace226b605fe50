"""
Comparison policies.

- Greedy max-age: always sample the user with the largest A_i / A_i^max.
- Randomized stationary: one categorical draw per slot over
  sample/retransmit options, independent of the state except that a
  retransmission without a pending packet idles.
"""

from typing import Optional, Sequence

from src.models.action import Action, CandidateKind
from src.models.params import StationaryPolicy, UserParams
from src.models.state import SchedulerState
from src.system.rng import SlotRng


def max_ratio_user(ages: Sequence[int], a_max: Sequence[float]) -> int:
    """Index of the largest age/budget ratio; lowest index wins ties."""
    best = 0
    best_ratio = ages[0] / a_max[0]
    for i in range(1, len(ages)):
        ratio = ages[i] / a_max[i]
        if ratio > best_ratio:
            best, best_ratio = i, ratio
    return best


def greedy_max_age_policy(state: SchedulerState, params: list[UserParams]) -> Action:
    """Sample-and-transmit for the user furthest over its age budget."""
    user = max_ratio_user(state.ages, [u.a_max for u in params])
    return Action.sample(state.n_users, user)


class GreedyMaxAgePolicy:
    """Policy wrapper around greedy_max_age_policy for the simulator."""

    name = "greedy_max_age"

    def __init__(self, params: list[UserParams]):
        self.params = params
        self._a_max = [u.a_max for u in params]

    def select(
        self,
        ages: list[int],
        queues: list[float],
        packet_ages: list[Optional[int]],
        rng: SlotRng,
    ) -> tuple[CandidateKind, Optional[int]]:
        return CandidateKind.SAMPLE_AND_TRANSMIT, max_ratio_user(ages, self._a_max)


class StationaryRandomPolicy:
    """
    Executes a StationaryPolicy.

    Consumes exactly one uniform per slot. Options are laid out as
    sample(1), retransmit(1), sample(2), retransmit(2), ...
    """

    name = "stationary"

    def __init__(self, params: list[UserParams], config: StationaryPolicy):
        self.params = params
        self.config = config
        self._options: list[tuple[float, CandidateKind, int]] = []
        cumulative = 0.0
        for i, (qs, qr) in enumerate(zip(config.q_sample, config.retransmit_probabilities)):
            if qs > 0:
                cumulative += qs
                self._options.append((cumulative, CandidateKind.SAMPLE_AND_TRANSMIT, i))
            if qr > 0:
                cumulative += qr
                self._options.append((cumulative, CandidateKind.RETRANSMIT, i))

    def select(
        self,
        ages: list[int],
        queues: list[float],
        packet_ages: list[Optional[int]],
        rng: SlotRng,
    ) -> tuple[CandidateKind, Optional[int]]:
        u = rng.uniform()
        for threshold, kind, user in self._options:
            if u < threshold:
                if kind is CandidateKind.RETRANSMIT and packet_ages[user] is None:
                    break
                return kind, user
        return CandidateKind.IDLE_ALL, None
