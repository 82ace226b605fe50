"""
Drift-plus-penalty scheduling.

Each slot the scheduler minimizes

    sum_i X_i [(A_i^p + 1) W_i + (A_i + 1)(1 - W_i) - A_i^max] + V c(t)

over the feasible actions. Because at most one user may transmit, the
feasible set collapses to idle, sample-and-transmit for some user, or
retransmit for a user holding a pending packet. Relative to idling the
objective changes by

    sample(i):      -X_i p_i A_i               + V (c_tr + c_s)
    retransmit(i):  -X_i p_i (A_i - A_i^p)     + V c_tr

so the argmin is an O(N) scan over at most 2N + 1 candidates.
"""

from typing import Optional, Sequence

from src.models.action import Action, CandidateAction, CandidateKind
from src.models.errors import InfeasibleActionError
from src.models.params import DppConfig, UserParams
from src.models.state import SchedulerState
from src.system.dynamics import cost_of_action, expected_delivery


def sample_delta(age: int, queue: float, p: float, c_sample: float, c_transmit: float, v: float) -> float:
    return -queue * p * age + v * (c_transmit + c_sample)


def retransmit_delta(age: int, queue: float, packet_age: int, p: float, c_transmit: float, v: float) -> float:
    return -queue * p * (age - packet_age) + v * c_transmit


def best_candidate(
    ages: Sequence[int],
    queues: Sequence[float],
    packet_ages: Sequence[Optional[int]],
    p: Sequence[float],
    c_sample: Sequence[float],
    c_transmit: Sequence[float],
    v: float,
) -> tuple[CandidateKind, Optional[int], float]:
    """
    Argmin over the candidate set on plain sequences.

    Ties keep the earlier candidate in the scan order idle, then per user
    (ascending) retransmit before sample, so idle wins exact ties, then the
    lowest user index, then retransmission.
    """
    best_kind = CandidateKind.IDLE_ALL
    best_user = None
    best_score = 0.0

    for i in range(len(ages)):
        pa = packet_ages[i]
        if pa is not None:
            score = retransmit_delta(ages[i], queues[i], pa, p[i], c_transmit[i], v)
            if score < best_score:
                best_kind, best_user, best_score = CandidateKind.RETRANSMIT, i, score
        score = sample_delta(ages[i], queues[i], p[i], c_sample[i], c_transmit[i], v)
        if score < best_score:
            best_kind, best_user, best_score = CandidateKind.SAMPLE_AND_TRANSMIT, i, score

    return best_kind, best_user, best_score


def action_delta(
    state: SchedulerState,
    params: list[UserParams],
    kind: CandidateKind,
    user: Optional[int],
    config: DppConfig,
) -> float:
    """Objective of one candidate minus the all-idle objective."""
    if kind is CandidateKind.IDLE_ALL:
        return 0.0

    if user is None or not 0 <= user < state.n_users:
        raise InfeasibleActionError(f"{kind.value} needs a valid user index, got {user}")

    view = state.users[user]
    up = params[user]
    if kind is CandidateKind.SAMPLE_AND_TRANSMIT:
        return sample_delta(view.age, view.queue, up.p, up.c_sample, up.c_transmit, config.v)

    if view.packet_age is None:
        raise InfeasibleActionError(f"user {user} has no pending packet to retransmit")
    return retransmit_delta(view.age, view.queue, view.packet_age, up.p, up.c_transmit, config.v)


def rank_candidates(
    state: SchedulerState,
    params: list[UserParams],
    config: DppConfig,
) -> list[CandidateAction]:
    """All 1 + N + (pending packets) candidates in scan order with their deltas."""
    candidates = [CandidateAction(CandidateKind.IDLE_ALL, None, 0.0)]
    for i, view in enumerate(state.users):
        if view.packet_age is not None:
            score = action_delta(state, params, CandidateKind.RETRANSMIT, i, config)
            candidates.append(CandidateAction(CandidateKind.RETRANSMIT, i, score))
        score = action_delta(state, params, CandidateKind.SAMPLE_AND_TRANSMIT, i, config)
        candidates.append(CandidateAction(CandidateKind.SAMPLE_AND_TRANSMIT, i, score))
    return candidates


def choose_action(
    state: SchedulerState,
    params: list[UserParams],
    config: DppConfig,
) -> Action:
    """The feasible action minimizing the drift-plus-penalty objective."""
    kind, user, score = best_candidate(
        state.ages,
        state.queues,
        state.packet_ages,
        [u.p for u in params],
        [u.c_sample for u in params],
        [u.c_transmit for u in params],
        config.v,
    )
    return CandidateAction(kind, user, score).to_action(state.n_users)


def drift_penalty_objective(
    state: SchedulerState,
    params: list[UserParams],
    action: Action,
    config: DppConfig,
) -> float:
    """
    Direct evaluation of the full per-slot objective for an arbitrary action.

    A freshly sampled packet has packet age 0; a retransmitted one uses the
    pending packet's age.
    """
    total = 0.0
    for i, (view, up) in enumerate(zip(state.users, params)):
        s_i, mu_i = action.s[i], action.mu[i]
        if s_i:
            pa = 0
        elif mu_i:
            if view.packet_age is None:
                raise InfeasibleActionError(f"user {i} has no pending packet to retransmit")
            pa = view.packet_age
        else:
            pa = 0
        w = expected_delivery(s_i, mu_i, up.p)
        total += view.queue * ((pa + 1) * w + (view.age + 1) * (1 - w) - up.a_max)
    return total + config.v * cost_of_action(action, params)
