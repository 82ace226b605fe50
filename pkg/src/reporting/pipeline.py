"""
Experiment orchestration: run the sweep, check the results, write files.
"""

import logging
from pathlib import Path
from typing import Callable, Optional

from src.analysis.bounds import (
    check_cost_bound,
    constraint_verdicts,
    monotone_within_noise,
    queue_stabilization,
    standard_error,
)
from src.analysis.cmdp import OracleResult, solve_user_oracle
from src.models.errors import OracleError
from src.models.params import DppConfig, ExperimentSpec, ProbabilitySweep, UserParams, VSweep
from src.reporting.report import (
    ExperimentReport,
    OracleReport,
    PointReport,
    TrendCheck,
    UserOracleReport,
)
from src.reporting.writers import write_summary, write_sweep_csv, write_trace_csv
from src.settings import RuntimeSettings
from src.simulation.sweep import EpisodeResult, SweepResult, pool_metrics, sweep

logger = logging.getLogger(__name__)


def resolve_output_dir(spec: ExperimentSpec, settings: RuntimeSettings) -> Path:
    """Config output_dir if given, else <AOI_OUTPUT_DIR>/<name>."""
    if spec.output_dir:
        return Path(spec.output_dir)
    return Path(settings.output_dir) / spec.name


class _OracleCache:
    """Solves each distinct user once; failures are remembered as messages."""

    def __init__(self, spec: ExperimentSpec, max_workers: int, known: Optional[dict[UserParams, OracleResult]] = None):
        self.spec = spec
        self.max_workers = max_workers
        self._results: dict[UserParams, object] = dict(known or {})

    def get(self, params: UserParams) -> tuple[Optional[OracleResult], Optional[str]]:
        if params not in self._results:
            try:
                self._results[params] = solve_user_oracle(params, self.spec.oracle, self.max_workers)
            except OracleError as exc:
                logger.warning("Oracle unavailable for p=%g a_max=%g: %s", params.p, params.a_max, exc)
                self._results[params] = str(exc)
        value = self._results[params]
        if isinstance(value, OracleResult):
            return value, None
        return None, value


def _point_reports(
    spec: ExperimentSpec,
    result: SweepResult,
    oracles: Optional[_OracleCache],
) -> tuple[list[PointReport], dict[int, OracleResult]]:
    table = result.table
    reports = []
    solved: dict[int, OracleResult] = {}

    for gp in result.points:
        rows = table[table["point"] == gp.index]
        ages = [
            rows[(rows["metric"] == "avg_age") & (rows["user"] == str(i + 1))].iloc[0]["mean"]
            for i in range(gp.config.n_users)
        ]
        report = PointReport(
            index=gp.index,
            label=gp.label,
            verdicts=constraint_verdicts(ages, gp.config.users, spec.age_tolerance),
            queue_stable=queue_stabilization(pool_metrics(result.episodes(gp.index))),
        )

        if oracles is not None:
            oracle, note = oracles.get(gp.config.users[0])
            if oracle is None:
                report.oracle_note = note
            else:
                solved[gp.index] = oracle
                cost = result.stat(gp.index, "avg_cost")
                b_bar = result.stat(gp.index, "avg_drift_bound")["mean"]
                report.bound = check_cost_bound(
                    avg_cost=cost["mean"],
                    c_opt=oracle.c_opt,
                    b_bar=b_bar,
                    v=gp.config.policy.v,
                    std_error=standard_error(cost["std"], int(cost["n"])),
                )
        reports.append(report)
    return reports, solved


def _series(result: SweepResult, metric: str, user: str) -> tuple[list[float], list[float], list[int]]:
    rows = [result.stat(gp.index, metric, user) for gp in result.points]
    return [r["mean"] for r in rows], [r["std"] for r in rows], [int(r["n"]) for r in rows]


def _trend_checks(spec: ExperimentSpec, result: SweepResult, reports: list[PointReport]) -> list[TrendCheck]:
    """Monotone claims along the sweep axis, each within 2 pooled std."""
    if len(result.points) < 2 or spec.sweep is None:
        return []

    n = spec.simulation.n_users
    checks = []
    if isinstance(spec.sweep, VSweep):
        checks.append(TrendCheck(
            "avg cost nonincreasing in V",
            monotone_within_noise(*_series(result, "avg_cost", "all"), decreasing=True),
        ))
        for i in range(n):
            user = str(i + 1)
            checks.append(TrendCheck(
                f"user {user} avg age nondecreasing in V",
                monotone_within_noise(*_series(result, "avg_age", user), decreasing=False),
            ))
            checks.append(TrendCheck(
                f"user {user} avg queue nondecreasing in V",
                monotone_within_noise(*_series(result, "avg_queue", user), decreasing=False),
            ))
        bounds = [r.bound for r in reports]
        if all(b is not None for b in bounds):
            _, stds, counts = _series(result, "avg_cost", "all")
            checks.append(TrendCheck(
                "cost gap to c_opt nonincreasing in V",
                monotone_within_noise([b.gap for b in bounds], stds, counts, decreasing=True),
            ))
    elif isinstance(spec.sweep, ProbabilitySweep):
        checks.append(TrendCheck(
            "avg cost nonincreasing along the p grid",
            monotone_within_noise(*_series(result, "avg_cost", "all"), decreasing=True),
        ))
    return checks


def run_experiment(
    spec: ExperimentSpec,
    settings: Optional[RuntimeSettings] = None,
    on_episode: Optional[Callable[[EpisodeResult], None]] = None,
    known_oracles: Optional[dict[UserParams, OracleResult]] = None,
) -> ExperimentReport:
    """
    Run every grid point and replication, then write the requested files.

    The cost bound is checked against the constrained-MDP oracle when the
    experiment has one user under the DPP policy.
    """
    settings = settings or RuntimeSettings()
    output_dir = resolve_output_dir(spec, settings)
    sim = spec.simulation

    result = sweep(
        sim,
        spec.sweep,
        max_workers=settings.max_workers,
        age_tolerance=spec.age_tolerance,
        on_done=on_episode,
    )

    oracles = None
    if sim.n_users == 1 and isinstance(sim.policy, DppConfig):
        oracles = _OracleCache(spec, settings.max_workers, known_oracles)

    points, solved = _point_reports(spec, result, oracles)
    report = ExperimentReport(
        spec=spec,
        output_dir=output_dir,
        result=result,
        points=points,
        trends=_trend_checks(spec, result, points),
        oracles=solved,
    )

    output_dir.mkdir(parents=True, exist_ok=True)
    if "trace" in spec.formats:
        report.files.append(write_trace_csv(result, output_dir / "trace.csv"))
    if "sweep" in spec.formats:
        report.files.append(write_sweep_csv(result, output_dir / "sweep.csv"))
    if "summary" in spec.formats:
        report.files.append(write_summary(report, output_dir / "summary.txt"))

    logger.info("Wrote %d file(s) to %s", len(report.files), output_dir)
    return report


def run_oracle(spec: ExperimentSpec, settings: Optional[RuntimeSettings] = None) -> OracleReport:
    """
    Solve the single-user constrained MDP for each user of the spec.

    With one user under the DPP policy the experiment is run as well so
    the summary carries the cost-bound check.
    """
    settings = settings or RuntimeSettings()
    users = []
    for i, params in enumerate(spec.simulation.users):
        try:
            users.append(UserOracleReport(user=i + 1, result=solve_user_oracle(params, spec.oracle, settings.max_workers)))
        except OracleError as exc:
            users.append(UserOracleReport(user=i + 1, result=None, error=str(exc)))

    experiment = None
    sim = spec.simulation
    if sim.n_users == 1 and isinstance(sim.policy, DppConfig):
        known = {sim.users[0]: users[0].result} if users[0].result is not None else None
        experiment = run_experiment(spec, settings, known_oracles=known)
    return OracleReport(spec=spec, users=users, experiment=experiment)
