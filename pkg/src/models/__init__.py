"""Data models."""

from src.models.action import Action, CandidateAction, CandidateKind, ChannelOutcome
from src.models.metrics import Metrics, TraceRecord
from src.models.params import (
    DppConfig,
    ExperimentSpec,
    GreedyMaxAgeConfig,
    OracleConfig,
    ProbabilitySweep,
    SimConfig,
    StationaryPolicy,
    UserParams,
    VSweep,
)
from src.models.state import (
    PacketBuffer,
    SchedulerState,
    UserState,
    UserView,
    VirtualQueueState,
)

__all__ = [
    "Action",
    "CandidateAction",
    "CandidateKind",
    "ChannelOutcome",
    "DppConfig",
    "ExperimentSpec",
    "GreedyMaxAgeConfig",
    "Metrics",
    "OracleConfig",
    "PacketBuffer",
    "ProbabilitySweep",
    "SchedulerState",
    "SimConfig",
    "StationaryPolicy",
    "TraceRecord",
    "UserParams",
    "UserState",
    "UserView",
    "VSweep",
    "VirtualQueueState",
]
