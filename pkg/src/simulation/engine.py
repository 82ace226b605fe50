"""
Episode runner.

`step` executes one slot by composing the dynamics functions on value
types; it is the reference semantics. `run_episode` runs the same slot
order in an inlined loop over plain numbers and accumulates the exact
finite-horizon averages as it goes. Both consume the random stream in
the same order (policy draw first, then the delivery draw), so they
produce identical trajectories.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Union

from src.agent.policies import Policy, build_policy, decide
from src.agent.queues import drift_bound_b, update_virtual_queues
from src.models.action import CandidateKind
from src.models.errors import InfeasibleActionError
from src.models.metrics import Metrics, TraceRecord
from src.models.params import SimConfig, UserParams, parse_sim_config
from src.models.state import SchedulerState, UserState, VirtualQueueState
from src.system.channel import realize_delivery
from src.system.dynamics import age_step, cost_of_action, take_sample, validate_action
from src.system.rng import SlotRng

logger = logging.getLogger(__name__)

DEFAULT_AGE_TOLERANCE = 0.05


@dataclass(frozen=True)
class EpisodeState:
    """Everything that evolves from slot to slot."""
    slot: int
    users: tuple[UserState, ...]
    queues: VirtualQueueState

    @classmethod
    def initial(cls, n_users: int) -> "EpisodeState":
        return cls(
            slot=0,
            users=tuple(UserState.initial() for _ in range(n_users)),
            queues=VirtualQueueState.initial(n_users),
        )


def step(
    state: EpisodeState,
    policy: Policy,
    params: list[UserParams],
    rng: SlotRng,
) -> tuple[EpisodeState, TraceRecord]:
    """Execute one slot and return the next state with the slot's record."""
    now = state.slot
    view = SchedulerState.observe(list(state.users), state.queues, now)
    action = decide(policy, view, rng)
    if not validate_action(action, list(state.users)):
        raise InfeasibleActionError(f"policy {policy.name} chose infeasible action {action} at slot {now}")

    users = [
        take_sample(user, now) if s_i else user
        for user, s_i in zip(state.users, action.s)
    ]
    outcome = realize_delivery(action, params, rng)
    users = [age_step(user, d_i, now) for user, d_i in zip(users, outcome.d)]
    queues = update_virtual_queues(state.queues, [u.age for u in users], params)

    record = TraceRecord(
        slot=now,
        ages=tuple(view.ages),
        queues=tuple(view.queues),
        s=action.s,
        mu=action.mu,
        d=outcome.d,
        cost=cost_of_action(action, params),
    )
    return EpisodeState(slot=now + 1, users=tuple(users), queues=queues), record


def _tail_starts(horizon: int) -> tuple[int, int]:
    """First slots of the last-10% and last-50% windows."""
    return horizon - max(1, horizon // 10), horizon - max(1, horizon // 2)


class _SettleTracker:
    """
    First downward crossing of the running-average age through the
    budget threshold after it has exceeded it.
    """

    def __init__(self, thresholds: list[float]):
        self.thresholds = thresholds
        self.exceeded = [False] * len(thresholds)
        self.slots: list[Optional[int]] = [0] * len(thresholds)
        self.done = [False] * len(thresholds)

    def update(self, user: int, t: int, age_sum: float) -> None:
        if self.done[user]:
            return
        above = age_sum > self.thresholds[user] * (t + 1)
        if not self.exceeded[user]:
            if above:
                self.exceeded[user] = True
                self.slots[user] = None
        elif not above:
            self.slots[user] = t
            self.done[user] = True


def metrics_from_trace(
    records: list[TraceRecord],
    params: list[UserParams],
    age_tolerance: float = DEFAULT_AGE_TOLERANCE,
) -> Metrics:
    """Recompute episode metrics from a full (stride 1) trace."""
    horizon = len(records)
    if horizon == 0:
        raise ValueError("empty trace")
    if any(r.slot != t for t, r in enumerate(records)):
        raise ValueError("metrics_from_trace needs one record per slot")

    n = len(params)
    t10, t50 = _tail_starts(horizon)
    settle = _SettleTracker([u.a_max * (1.0 + age_tolerance) for u in params])
    age_sum = [0] * n
    queue_sum = [0.0] * n
    tail10 = [0.0] * n
    tail50 = [0.0] * n
    cost_sum = 0.0
    b_sum = 0.0

    for t, r in enumerate(records):
        view = SchedulerState.observe(
            [UserState(age=a) for a in r.ages], VirtualQueueState(x=r.queues), t
        )
        b_sum += drift_bound_b(view, params)
        cost_sum += r.cost
        for i in range(n):
            age_sum[i] += r.ages[i]
            queue_sum[i] += r.queues[i]
            if t >= t50:
                tail50[i] += r.queues[i]
            if t >= t10:
                tail10[i] += r.queues[i]
            settle.update(i, t, age_sum[i])

    return Metrics(
        horizon=horizon,
        avg_age=tuple(s / horizon for s in age_sum),
        avg_cost=cost_sum / horizon,
        transmission_rate=tuple(sum(r.mu[i] for r in records) / horizon for i in range(n)),
        sampling_rate=tuple(sum(r.s[i] for r in records) / horizon for i in range(n)),
        avg_queue=tuple(s / horizon for s in queue_sum),
        avg_drift_bound=b_sum / horizon,
        deliveries=tuple(sum(r.d[i] for r in records) for i in range(n)),
        transmit_slots=sum(1 for r in records if any(r.mu)),
        settle_slot=tuple(settle.slots),
        queue_tail_10=tuple(s / (horizon - t10) for s in tail10),
        queue_tail_50=tuple(s / (horizon - t50) for s in tail50),
    )


def with_running_averages(records: list[TraceRecord]) -> list[TraceRecord]:
    """Fill avg_ages/avg_cost on a stride-1 trace."""
    out = []
    n = len(records[0].ages) if records else 0
    age_sum = [0] * n
    cost_sum = 0.0
    for t, r in enumerate(records):
        for i in range(n):
            age_sum[i] += r.ages[i]
        cost_sum += r.cost
        out.append(replace(
            r,
            avg_ages=tuple(a / (t + 1) for a in age_sum),
            avg_cost=cost_sum / (t + 1),
        ))
    return out


def run_reference_episode(
    config: Union[SimConfig, dict],
    point: int = 0,
    replication: int = 0,
    age_tolerance: float = DEFAULT_AGE_TOLERANCE,
) -> tuple[Metrics, list[TraceRecord]]:
    """Run an episode slot by slot through `step`; returns the stride-1 trace."""
    config = parse_sim_config(config)
    params = list(config.users)
    policy = build_policy(config.policy, params)
    rng = SlotRng.for_stream(config.seed, point, replication)

    state = EpisodeState.initial(len(params))
    records = []
    for _ in range(config.horizon):
        state, record = step(state, policy, params, rng)
        records.append(record)

    records = with_running_averages(records)
    return metrics_from_trace(records, params, age_tolerance), records


def run_episode(
    config: Union[SimConfig, dict],
    point: int = 0,
    replication: int = 0,
    keep_trace: bool = True,
    age_tolerance: float = DEFAULT_AGE_TOLERANCE,
) -> tuple[Metrics, list[TraceRecord]]:
    """
    Simulate `config.horizon` slots from the initial conditions.

    The random stream is indexed by (seed, point, replication). A trace
    record is kept every `metrics_stride` slots, starting at slot 0.
    """
    config = parse_sim_config(config)
    params = list(config.users)
    policy = build_policy(config.policy, params)
    rng = SlotRng.for_stream(config.seed, point, replication)

    n = len(params)
    horizon = config.horizon
    stride = config.metrics_stride
    p = [u.p for u in params]
    a_max = [u.a_max for u in params]
    c_sample = [u.c_sample for u in params]
    c_transmit = [u.c_transmit for u in params]
    half_budget_sq = sum(a * a for a in a_max) / 2.0
    t10, t50 = _tail_starts(horizon)
    settle = _SettleTracker([a * (1.0 + age_tolerance) for a in a_max])

    ages = [1] * n
    queues = [0.0] * n
    sample_slot: list[Optional[int]] = [None] * n  # pending packet's sampling slot

    age_sum = [0] * n
    queue_sum = [0.0] * n
    tail10 = [0.0] * n
    tail50 = [0.0] * n
    transmissions = [0] * n
    samples = [0] * n
    deliveries = [0] * n
    cost_sum = 0.0
    b_sum = 0.0
    transmit_slots = 0
    records: list[TraceRecord] = []

    sample_kind = CandidateKind.SAMPLE_AND_TRANSMIT
    idle_kind = CandidateKind.IDLE_ALL
    select = policy.select
    uniform = rng.uniform

    for t in range(horizon):
        packet_ages = [None if ss is None else t - ss for ss in sample_slot]
        kind, user = select(ages, queues, packet_ages, rng)

        cost = 0.0
        delivered = 0
        if kind is not idle_kind:
            if kind is sample_kind:
                sample_slot[user] = t
                samples[user] += 1
                cost = c_transmit[user] + c_sample[user]
            else:
                if sample_slot[user] is None:
                    raise InfeasibleActionError(
                        f"policy {policy.name} retransmitted for user {user} with nothing pending at slot {t}"
                    )
                cost = c_transmit[user]
            transmissions[user] += 1
            transmit_slots += 1
            if uniform() < p[user]:
                delivered = 1
                deliveries[user] += 1

        recording = keep_trace and t % stride == 0
        if recording:
            start_ages = tuple(ages)
            start_queues = tuple(queues)

        b = half_budget_sq
        for i in range(n):
            a = ages[i]
            x = queues[i]
            age_sum[i] += a
            queue_sum[i] += x
            if t >= t50:
                tail50[i] += x
                if t >= t10:
                    tail10[i] += x
            b += (a + 1) * (a + 1) / 2.0
            settle.update(i, t, age_sum[i])

            if delivered and i == user:
                a = t - sample_slot[i] + 1
                sample_slot[i] = None
            else:
                a += 1
            ages[i] = a
            x -= a_max[i]
            queues[i] = (x if x > 0.0 else 0.0) + a

        cost_sum += cost
        b_sum += b

        if recording:
            s_flags = tuple(1 if (kind is sample_kind and i == user) else 0 for i in range(n))
            mu_flags = tuple(1 if (kind is not idle_kind and i == user) else 0 for i in range(n))
            d_flags = tuple(1 if (delivered and i == user) else 0 for i in range(n))
            records.append(TraceRecord(
                slot=t,
                ages=start_ages,
                queues=start_queues,
                s=s_flags,
                mu=mu_flags,
                d=d_flags,
                cost=cost,
                avg_ages=tuple(s / (t + 1) for s in age_sum),
                avg_cost=cost_sum / (t + 1),
            ))

    metrics = Metrics(
        horizon=horizon,
        avg_age=tuple(s / horizon for s in age_sum),
        avg_cost=cost_sum / horizon,
        transmission_rate=tuple(c / horizon for c in transmissions),
        sampling_rate=tuple(c / horizon for c in samples),
        avg_queue=tuple(s / horizon for s in queue_sum),
        avg_drift_bound=b_sum / horizon,
        deliveries=tuple(deliveries),
        transmit_slots=transmit_slots,
        settle_slot=tuple(settle.slots),
        queue_tail_10=tuple(s / (horizon - t10) for s in tail10),
        queue_tail_50=tuple(s / (horizon - t50) for s in tail50),
    )
    logger.debug(
        "episode point=%d rep=%d policy=%s: avg_cost=%.6g avg_age=%s",
        point, replication, policy.name, metrics.avg_cost,
        ", ".join(f"{a:.4g}" for a in metrics.avg_age),
    )
    return metrics, records
