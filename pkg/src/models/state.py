"""
Per-slot state of the users, the receiver and the virtual queues.

Initial conditions: every user starts with age 1, an empty buffer and
a zero virtual queue.
"""

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class PacketBuffer:
    """The single packet a user holds, sampled at `sample_slot`."""
    sample_slot: int
    delivered: bool = False

    def __post_init__(self):
        if self.sample_slot < 0:
            raise ValueError(f"sample_slot must be >= 0, got {self.sample_slot}")

    @property
    def pending(self) -> bool:
        """True if the packet may still be retransmitted."""
        return not self.delivered


@dataclass(frozen=True)
class UserState:
    """Receiver-side age of one user plus that user's buffer."""
    age: int = 1
    buffer: Optional[PacketBuffer] = None

    def __post_init__(self):
        if self.age < 1:
            raise ValueError(f"age must be >= 1, got {self.age}")

    @property
    def has_pending(self) -> bool:
        return self.buffer is not None and self.buffer.pending

    @classmethod
    def initial(cls) -> "UserState":
        return cls()


@dataclass(frozen=True)
class VirtualQueueState:
    """Virtual queue backlogs X_i(t), one per user."""
    x: tuple[float, ...]

    def __post_init__(self):
        if any(value < 0 for value in self.x):
            raise ValueError("virtual queues must be nonnegative")

    @classmethod
    def initial(cls, n_users: int) -> "VirtualQueueState":
        return cls(x=tuple(0.0 for _ in range(n_users)))

    def __len__(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class UserView:
    """What the scheduler sees of one user at the start of a slot."""
    age: int
    queue: float
    packet_age: Optional[int] = None  # None when nothing is pending


@dataclass(frozen=True)
class SchedulerState:
    """Network state S_t observed at the beginning of slot `slot`."""
    slot: int
    users: tuple[UserView, ...]

    @classmethod
    def observe(
        cls,
        states: list[UserState],
        queues: VirtualQueueState,
        now: int,
    ) -> "SchedulerState":
        """Build the scheduler's view from user states and queues."""
        if len(states) != len(queues):
            raise ValueError(
                f"{len(states)} user states but {len(queues)} virtual queues"
            )
        views = []
        for state, x in zip(states, queues.x):
            packet_age = None
            if state.has_pending:
                packet_age = now - state.buffer.sample_slot
            views.append(UserView(age=state.age, queue=x, packet_age=packet_age))
        return cls(slot=now, users=tuple(views))

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def ages(self) -> list[int]:
        return [u.age for u in self.users]

    @property
    def queues(self) -> list[float]:
        return [u.queue for u in self.users]

    @property
    def packet_ages(self) -> list[Optional[int]]:
        return [u.packet_age for u in self.users]
