"""
Episode results: time averages and the downsampled slot trace.
"""

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class TraceRecord:
    """
    One sampled slot of an episode.

    Ages and queues are the values at the start of the slot; the
    running averages cover slots 0..slot inclusive.
    """
    slot: int
    ages: tuple[int, ...]
    queues: tuple[float, ...]
    s: tuple[int, ...]
    mu: tuple[int, ...]
    d: tuple[int, ...]
    cost: float
    avg_ages: tuple[float, ...] = ()
    avg_cost: float = 0.0


@dataclass(frozen=True)
class Metrics:
    """Exact finite-horizon time averages for one episode."""
    horizon: int
    avg_age: tuple[float, ...]
    avg_cost: float
    transmission_rate: tuple[float, ...]
    sampling_rate: tuple[float, ...]
    avg_queue: tuple[float, ...]
    avg_drift_bound: float
    deliveries: tuple[int, ...]
    transmit_slots: int
    settle_slot: tuple[Optional[int], ...]
    queue_tail_10: tuple[float, ...] = field(default=())  # mean X over the last 10% of slots
    queue_tail_50: tuple[float, ...] = field(default=())  # mean X over the last 50% of slots

    @property
    def n_users(self) -> int:
        return len(self.avg_age)

    @property
    def retransmission_rate(self) -> tuple[float, ...]:
        return tuple(m - s for m, s in zip(self.transmission_rate, self.sampling_rate))

    def settle_or_horizon(self, user: int) -> int:
        """Settle slot with "never returned" reported as the horizon."""
        slot = self.settle_slot[user]
        return self.horizon if slot is None else slot

    def queue_stabilized(self, user: int, rel_tol: float = 0.05) -> bool:
        """Last-10% window mean within rel_tol of the last-50% window mean."""
        tail10 = self.queue_tail_10[user]
        tail50 = self.queue_tail_50[user]
        if tail50 == 0.0:
            return tail10 == 0.0
        return abs(tail10 - tail50) <= rel_tol * abs(tail50)

    def rows(self) -> list[tuple[str, str, float]]:
        """Flatten into (metric, user, value) rows; user is "all" for system metrics."""
        out: list[tuple[str, str, float]] = [
            ("avg_cost", "all", self.avg_cost),
            ("avg_drift_bound", "all", self.avg_drift_bound),
            ("transmit_slots", "all", float(self.transmit_slots)),
        ]
        for i in range(self.n_users):
            user = str(i + 1)
            out.extend([
                ("avg_age", user, self.avg_age[i]),
                ("transmission_rate", user, self.transmission_rate[i]),
                ("sampling_rate", user, self.sampling_rate[i]),
                ("retransmission_rate", user, self.retransmission_rate[i]),
                ("avg_queue", user, self.avg_queue[i]),
                ("deliveries", user, float(self.deliveries[i])),
                ("settle_slot", user, float(self.settle_or_horizon(i))),
            ])
        return out
