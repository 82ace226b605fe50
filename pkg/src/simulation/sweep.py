"""
Parameter sweeps with replications.

A sweep expands a base SimConfig along one axis (V or success
probabilities) into labelled grid points, runs every
(point, replication) episode on its own random stream, and aggregates
the per-episode metrics into a mean/std table with pandas.

Episodes are independent, so they run on a process pool. Results are
collected by (point, replication) index and reduced in that order,
which makes the output independent of the worker count.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Optional

import pandas as pd

from src.models.metrics import Metrics, TraceRecord
from src.models.params import DppConfig, ProbabilitySweep, SimConfig, SweepAxis, VSweep
from src.simulation.engine import DEFAULT_AGE_TOLERANCE, run_episode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridPoint:
    """One point of a sweep."""
    index: int
    label: str
    config: SimConfig

    @property
    def v(self) -> Optional[float]:
        policy = self.config.policy
        return policy.v if isinstance(policy, DppConfig) else None

    @property
    def p(self) -> tuple[float, ...]:
        return tuple(u.p for u in self.config.users)


@dataclass(frozen=True)
class EpisodeTask:
    point: int
    replication: int
    config: SimConfig
    keep_trace: bool
    age_tolerance: float


@dataclass(frozen=True)
class EpisodeResult:
    point: int
    replication: int
    metrics: Metrics
    trace: list[TraceRecord]


@dataclass
class SweepResult:
    """Per-episode metrics, replication-0 traces and the aggregate table."""
    points: list[GridPoint]
    metrics: dict[tuple[int, int], Metrics]
    traces: dict[int, list[TraceRecord]] = field(default_factory=dict)
    table: pd.DataFrame = field(default_factory=pd.DataFrame)

    def episodes(self, point: int) -> list[Metrics]:
        """Metrics of every replication of a point, in replication order."""
        return [m for (pt, _), m in sorted(self.metrics.items()) if pt == point]

    def stat(self, point: int, metric: str, user: str = "all") -> pd.Series:
        """The (mean, std, n) row for one metric at one point."""
        rows = self.table[
            (self.table["point"] == point)
            & (self.table["metric"] == metric)
            & (self.table["user"] == user)
        ]
        if rows.empty:
            raise KeyError(f"no {metric}/{user} at point {point}")
        return rows.iloc[0]


def _format_value(value: float) -> str:
    return f"{value:.9g}"


def grid_points(base: SimConfig, axis: Optional[SweepAxis] = None) -> list[GridPoint]:
    """Expand a sweep axis into grid points; no axis means a single point."""
    if axis is None:
        return [GridPoint(0, "base", base)]

    points = []
    if isinstance(axis, VSweep):
        for k, v in enumerate(axis.values):
            config = base.model_copy(update={"policy": DppConfig(v=v)})
            points.append(GridPoint(k, f"V={_format_value(v)}", config))
    elif isinstance(axis, ProbabilitySweep):
        n = base.n_users
        for k, values in enumerate(axis.values):
            probs = values * n if len(values) == 1 else values
            if len(probs) != n:
                raise ValueError(f"probability point {list(values)} does not match {n} users")
            users = tuple(u.model_copy(update={"p": p}) for u, p in zip(base.users, probs))
            label = "p=" + (
                _format_value(values[0]) if len(values) == 1
                else "(" + ",".join(_format_value(p) for p in probs) + ")"
            )
            points.append(GridPoint(k, label, base.model_copy(update={"users": users})))
    else:
        raise ValueError(f"Unknown sweep axis: {axis!r}")
    return points


def _run_task(task: EpisodeTask) -> EpisodeResult:
    metrics, trace = run_episode(
        task.config,
        point=task.point,
        replication=task.replication,
        keep_trace=task.keep_trace,
        age_tolerance=task.age_tolerance,
    )
    return EpisodeResult(task.point, task.replication, metrics, trace)


def run_tasks(
    tasks: list[EpisodeTask],
    max_workers: int = 1,
    on_done: Optional[Callable[[EpisodeResult], None]] = None,
) -> dict[tuple[int, int], EpisodeResult]:
    """Run episodes, in-process for one worker, on a process pool otherwise."""
    results: dict[tuple[int, int], EpisodeResult] = {}

    if max_workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            result = _run_task(task)
            results[(task.point, task.replication)] = result
            if on_done:
                on_done(result)
        return results

    with ProcessPoolExecutor(max_workers=max_workers) as executor:
        future_to_task = {executor.submit(_run_task, task): task for task in tasks}
        for future in as_completed(future_to_task):
            task = future_to_task[future]
            try:
                result = future.result()
            except Exception:
                logger.error("episode point=%d rep=%d failed", task.point, task.replication)
                for pending in future_to_task:
                    pending.cancel()
                raise
            results[(task.point, task.replication)] = result
            if on_done:
                on_done(result)
    return results


def aggregate(points: list[GridPoint], metrics: dict[tuple[int, int], Metrics]) -> pd.DataFrame:
    """
    Mean, sample std (ddof=1) and count of every metric per point.

    Columns: point, label, v, p, metric, user, mean, std, n. `p` is the
    per-user probabilities joined with ";"; `v` is NaN for non-DPP runs.
    """
    rows = []
    for (point, replication) in sorted(metrics):
        for metric, user, value in metrics[(point, replication)].rows():
            rows.append({"point": point, "metric": metric, "user": user, "value": value})
    df = pd.DataFrame(rows, columns=["point", "metric", "user", "value"])

    table = (
        df.groupby(["point", "metric", "user"], sort=False)["value"]
        .agg(mean="mean", std="std", n="count")
        .reset_index()
    )
    table["std"] = table["std"].fillna(0.0)

    info = pd.DataFrame([
        {
            "point": gp.index,
            "label": gp.label,
            "v": gp.v if gp.v is not None else math.nan,
            "p": ";".join(_format_value(p) for p in gp.p),
        }
        for gp in points
    ])
    table = info.merge(table, on="point", how="right")
    return table[["point", "label", "v", "p", "metric", "user", "mean", "std", "n"]]


def sweep(
    base: SimConfig,
    axis: Optional[SweepAxis] = None,
    replications: Optional[int] = None,
    max_workers: int = 1,
    age_tolerance: float = DEFAULT_AGE_TOLERANCE,
    trace_replications: tuple[int, ...] = (0,),
    on_done: Optional[Callable[[EpisodeResult], None]] = None,
) -> SweepResult:
    """
    Run every grid point `replications` times (default: base.replications).

    Traces are kept only for the replications listed in
    `trace_replications`; the result stores replication 0's.
    """
    replications = replications or base.replications
    points = grid_points(base, axis)
    tasks = [
        EpisodeTask(
            point=gp.index,
            replication=r,
            config=gp.config,
            keep_trace=r in trace_replications,
            age_tolerance=age_tolerance,
        )
        for gp in points
        for r in range(replications)
    ]
    logger.info(
        "Sweep: %d point(s) x %d replication(s), horizon %d, %d worker(s)",
        len(points), replications, base.horizon, max_workers,
    )

    results = run_tasks(tasks, max_workers=max_workers, on_done=on_done)
    metrics = {key: results[key].metrics for key in sorted(results)}
    traces = {gp.index: results[(gp.index, 0)].trace for gp in points if (gp.index, 0) in results}

    return SweepResult(
        points=points,
        metrics=metrics,
        traces=traces,
        table=aggregate(points, metrics),
    )


def pool_metrics(episodes: list[Metrics]) -> Metrics:
    """
    Combine replications of one point.

    Averages are averaged, counts summed. A user's settle slot is the
    latest across replications, with "never returned" dominating.
    """
    if not episodes:
        raise ValueError("no episodes to pool")
    k = len(episodes)
    n = episodes[0].n_users

    def mean_tuple(attr: str) -> tuple[float, ...]:
        return tuple(sum(getattr(m, attr)[i] for m in episodes) / k for i in range(n))

    settle = []
    for i in range(n):
        slots = [m.settle_slot[i] for m in episodes]
        settle.append(None if any(s is None for s in slots) else max(slots))

    return Metrics(
        horizon=episodes[0].horizon,
        avg_age=mean_tuple("avg_age"),
        avg_cost=sum(m.avg_cost for m in episodes) / k,
        transmission_rate=mean_tuple("transmission_rate"),
        sampling_rate=mean_tuple("sampling_rate"),
        avg_queue=mean_tuple("avg_queue"),
        avg_drift_bound=sum(m.avg_drift_bound for m in episodes) / k,
        deliveries=tuple(sum(m.deliveries[i] for m in episodes) for i in range(n)),
        transmit_slots=sum(m.transmit_slots for m in episodes),
        settle_slot=tuple(settle),
        queue_tail_10=mean_tuple("queue_tail_10"),
        queue_tail_50=mean_tuple("queue_tail_50"),
    )
