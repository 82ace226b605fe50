"""Episode simulation and parameter sweeps."""

from src.simulation.engine import (
    EpisodeState,
    metrics_from_trace,
    run_episode,
    run_reference_episode,
    step,
)
from src.simulation.sweep import GridPoint, SweepResult, grid_points, pool_metrics, sweep

__all__ = [
    "EpisodeState",
    "GridPoint",
    "SweepResult",
    "grid_points",
    "metrics_from_trace",
    "pool_metrics",
    "run_episode",
    "run_reference_episode",
    "step",
    "sweep",
]
