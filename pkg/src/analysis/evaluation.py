"""Monte-Carlo evaluation of a randomized stationary policy."""

from typing import Union

from src.models.metrics import Metrics
from src.models.params import SimConfig, StationaryPolicy, parse_sim_config
from src.simulation.sweep import pool_metrics, sweep


def evaluate_stationary(
    policy: StationaryPolicy,
    config: Union[SimConfig, dict],
    max_workers: int = 1,
) -> Metrics:
    """
    Simulate `policy` on the users and horizon of `config`.

    All `config.replications` episodes are pooled: averages are averaged,
    counts summed.
    """
    config = parse_sim_config(config)
    config = parse_sim_config(
        config.model_copy(update={"policy": policy}).model_dump()
    )
    result = sweep(config, None, max_workers=max_workers, trace_replications=())
    return pool_metrics(result.episodes(0))
