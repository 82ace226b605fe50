"""
Slot decisions and their channel outcomes.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional


class CandidateKind(Enum):
    """The structurally distinct decisions available in one slot."""
    IDLE_ALL = "idle"
    SAMPLE_AND_TRANSMIT = "sample"
    RETRANSMIT = "retransmit"


@dataclass(frozen=True)
class Action:
    """
    Joint decision for one slot.

    s[i] = 1 samples a fresh packet for user i; mu[i] = 1 lets user i
    transmit. Sampling always implies a same-slot transmission.
    """
    s: tuple[int, ...]
    mu: tuple[int, ...]

    @classmethod
    def idle(cls, n_users: int) -> "Action":
        zeros = tuple(0 for _ in range(n_users))
        return cls(s=zeros, mu=zeros)

    @classmethod
    def sample(cls, n_users: int, user: int) -> "Action":
        flags = tuple(1 if i == user else 0 for i in range(n_users))
        return cls(s=flags, mu=flags)

    @classmethod
    def retransmit(cls, n_users: int, user: int) -> "Action":
        return cls(
            s=tuple(0 for _ in range(n_users)),
            mu=tuple(1 if i == user else 0 for i in range(n_users)),
        )

    @property
    def n_users(self) -> int:
        return len(self.mu)

    @property
    def active_user(self) -> Optional[int]:
        """The first transmitting user, or None for an idle slot."""
        for i, flag in enumerate(self.mu):
            if flag:
                return i
        return None

    @property
    def kind(self) -> CandidateKind:
        user = self.active_user
        if user is None:
            return CandidateKind.IDLE_ALL
        if self.s[user]:
            return CandidateKind.SAMPLE_AND_TRANSMIT
        return CandidateKind.RETRANSMIT

    def __str__(self) -> str:
        user = self.active_user
        if user is None:
            return "idle"
        return f"{self.kind.value}({user})"


@dataclass(frozen=True)
class ChannelOutcome:
    """Per-user delivery indicators d_i for one slot."""
    d: tuple[int, ...]

    @classmethod
    def none(cls, n_users: int) -> "ChannelOutcome":
        return cls(d=tuple(0 for _ in range(n_users)))


@dataclass(frozen=True)
class CandidateAction:
    """One entry of the scheduler's candidate list with its objective delta."""
    kind: CandidateKind
    user: Optional[int]
    score: float

    def to_action(self, n_users: int) -> Action:
        if self.kind is CandidateKind.IDLE_ALL:
            return Action.idle(n_users)
        if self.kind is CandidateKind.SAMPLE_AND_TRANSMIT:
            return Action.sample(n_users, self.user)
        return Action.retransmit(n_users, self.user)

    def __str__(self) -> str:
        target = "" if self.user is None else f"({self.user})"
        return f"{self.kind.value}{target} -> {self.score:.4g}"
