"""
Checks of simulated runs against the age budgets and the DPP cost bound.

For the drift-plus-penalty policy with weight V the long-run cost
satisfies c_opt <= c_bar <= c_opt + B/V, with B the per-slot drift
constant. The lower side holds only when the age constraints are met,
so it is checked against the Monte-Carlo error of c_bar.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from src.models.metrics import Metrics
from src.models.params import UserParams


@dataclass(frozen=True)
class ConstraintVerdict:
    user: int  # 1-based
    avg_age: float
    a_max: float
    tolerance: float
    satisfied: bool

    def __str__(self) -> str:
        status = "OK" if self.satisfied else "VIOLATED"
        return (
            f"user {self.user}: avg age {self.avg_age:.4f} vs budget {self.a_max:g} "
            f"(+{self.tolerance:.0%}) {status}"
        )


@dataclass(frozen=True)
class CostBoundCheck:
    """How a measured DPP cost sits relative to [c_opt, c_opt + B/V]."""
    v: float
    avg_cost: float
    std_error: float
    c_opt: float
    b_bar: float
    upper_ok: bool
    lower_ok: bool

    @property
    def slack(self) -> float:
        """B/V; infinite at V = 0."""
        return self.b_bar / self.v if self.v > 0 else math.inf

    @property
    def gap(self) -> float:
        return self.avg_cost - self.c_opt


def constraint_verdicts(
    avg_ages: Sequence[float],
    params: Sequence[UserParams],
    tolerance: float = 0.05,
) -> list[ConstraintVerdict]:
    """Per-user check of avg age against a_max * (1 + tolerance)."""
    return [
        ConstraintVerdict(
            user=i + 1,
            avg_age=age,
            a_max=up.a_max,
            tolerance=tolerance,
            satisfied=age <= up.a_max * (1.0 + tolerance),
        )
        for i, (age, up) in enumerate(zip(avg_ages, params))
    ]


def check_cost_bound(
    avg_cost: float,
    c_opt: float,
    b_bar: float,
    v: float,
    std_error: float = 0.0,
    z: float = 3.0,
) -> CostBoundCheck:
    """
    Upper side: c_bar <= c_opt + B/V + z * SE. Lower side: c_bar >= c_opt - z * SE.
    """
    slack = b_bar / v if v > 0 else math.inf
    return CostBoundCheck(
        v=v,
        avg_cost=avg_cost,
        std_error=std_error,
        c_opt=c_opt,
        b_bar=b_bar,
        upper_ok=avg_cost <= c_opt + slack + z * std_error,
        lower_ok=avg_cost >= c_opt - z * std_error,
    )


def standard_error(std: float, n: int) -> float:
    return std / math.sqrt(n) if n > 0 else math.inf


def pooled_std(std_a: float, n_a: int, std_b: float, n_b: int) -> float:
    """Pooled sample standard deviation of two groups."""
    dof = n_a + n_b - 2
    if dof <= 0:
        return max(std_a, std_b)
    return math.sqrt(((n_a - 1) * std_a ** 2 + (n_b - 1) * std_b ** 2) / dof)


def monotone_within_noise(
    means: Sequence[float],
    stds: Sequence[float],
    counts: Sequence[int],
    decreasing: bool = True,
    k: float = 2.0,
) -> bool:
    """
    True if consecutive means never move the wrong way by more than
    k pooled standard deviations.
    """
    for a in range(len(means) - 1):
        b = a + 1
        noise = k * pooled_std(stds[a], counts[a], stds[b], counts[b])
        step = means[b] - means[a]
        if decreasing and step > noise:
            return False
        if not decreasing and step < -noise:
            return False
    return True


def queue_stabilization(metrics: Metrics, rel_tol: float = 0.05) -> list[Optional[bool]]:
    """Per user: did the queue level off over the second half of the run?"""
    if not metrics.queue_tail_10:
        return [None] * metrics.n_users
    return [metrics.queue_stabilized(i, rel_tol) for i in range(metrics.n_users)]
