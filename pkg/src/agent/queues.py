"""
Virtual queues for the time-average age constraints.

X_i(t+1) = max(X_i(t) - A_i^max, 0) + A_i(t+1): arrivals are ages,
service is the budget. Stability of X_i implies the average age of
user i stays within A_i^max.
"""

from src.models.params import UserParams
from src.models.state import SchedulerState, VirtualQueueState


def queue_step(x: float, a_max: float, new_age: int) -> float:
    drained = x - a_max
    return (drained if drained > 0.0 else 0.0) + new_age


def update_virtual_queues(
    queues: VirtualQueueState,
    new_ages: list[int],
    params: list[UserParams],
) -> VirtualQueueState:
    """Apply the queue recursion element-wise with the post-slot ages."""
    return VirtualQueueState(
        x=tuple(
            queue_step(x, up.a_max, a)
            for x, a, up in zip(queues.x, new_ages, params)
        )
    )


def drift_bound_b(state: SchedulerState, params: list[UserParams]) -> float:
    """
    Per-slot drift constant sum_i [(A_i + 1)^2 + (A_i^max)^2] / 2.

    State dependent; run reports use its time average as the plug-in B.
    """
    return sum(
        ((view.age + 1) ** 2 + up.a_max ** 2) / 2.0
        for view, up in zip(state.users, params)
    )
