"""
CSV and text outputs.

trace.csv  one row per (grid point, sampled slot, user) for replication 0:
           point,label,replication,slot,user,avg_age,age,queue,sampled,
           transmitted,delivered,avg_cost,slot_cost
sweep.csv  one row per (grid point, metric, user):
           point,label,v,p,metric,user,mean,std,n
summary.txt  final averages, constraint verdicts, bound and queue reports

Floats are written with 9 significant digits and "\n" line endings so
reruns of the same config are byte-identical.
"""

import math
from pathlib import Path

import pandas as pd

from src.reporting.report import ExperimentReport
from src.simulation.sweep import SweepResult

FLOAT_FORMAT = "%.9g"

TRACE_COLUMNS = [
    "point", "label", "replication", "slot", "user",
    "avg_age", "age", "queue", "sampled", "transmitted", "delivered",
    "avg_cost", "slot_cost",
]


def trace_frame(result: SweepResult) -> pd.DataFrame:
    """Long-format trace table for the replication-0 episodes."""
    labels = {gp.index: gp.label for gp in result.points}
    rows = []
    for point in sorted(result.traces):
        for record in result.traces[point]:
            for i in range(len(record.ages)):
                rows.append((
                    point, labels[point], 0, record.slot, i + 1,
                    record.avg_ages[i], record.ages[i], record.queues[i],
                    record.s[i], record.mu[i], record.d[i],
                    record.avg_cost, record.cost,
                ))
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def _write_frame(df: pd.DataFrame, path: Path) -> Path:
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_trace_csv(result: SweepResult, path: Path) -> Path:
    return _write_frame(trace_frame(result), path)


def write_sweep_csv(result: SweepResult, path: Path) -> Path:
    return _write_frame(result.table, path)


def _g(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6g}"


def render_summary(report: ExperimentReport) -> str:
    """Plain-text summary; deterministic for a given report."""
    spec = report.spec
    sim = spec.simulation
    table = report.result.table
    lines = [
        f"experiment: {spec.name}",
        f"policy: {sim.policy.kind}",
        f"users: {sim.n_users}",
        f"horizon: {sim.horizon}  replications: {sim.replications}  seed: {sim.seed}",
        f"age tolerance: {spec.age_tolerance:.0%}",
        "",
    ]

    for point in report.points:
        rows = table[table["point"] == point.index]
        lines.append(f"[{point.label}]")

        cost = rows[(rows["metric"] == "avg_cost")].iloc[0]
        lines.append(f"  avg cost: {_g(cost['mean'])} (std {_g(cost['std'])}, n={int(cost['n'])})")
        for i in range(sim.n_users):
            user = str(i + 1)
            stats = {
                metric: rows[(rows["metric"] == metric) & (rows["user"] == user)].iloc[0]["mean"]
                for metric in ("avg_age", "transmission_rate", "sampling_rate", "avg_queue", "settle_slot")
            }
            lines.append(
                f"  user {user}: avg age {_g(stats['avg_age'])}, "
                f"transmissions/slot {_g(stats['transmission_rate'])}, "
                f"samples/slot {_g(stats['sampling_rate'])}, "
                f"avg queue {_g(stats['avg_queue'])}, "
                f"settle slot {_g(stats['settle_slot'])}"
            )

        lines.append("  constraints:")
        for verdict in point.verdicts:
            lines.append(f"    {verdict}")

        lines.append("  virtual queues:")
        for i, stable in enumerate(point.queue_stable):
            state = "n/a" if stable is None else ("stabilized" if stable else "still moving")
            lines.append(f"    user {i + 1}: {state} (last-10% vs last-50% window mean within 5%)")

        if point.bound is not None:
            b = point.bound
            lines.extend([
                "  cost bound:",
                f"    c_bar = {_g(b.avg_cost)} +/- {_g(b.std_error)} (SE)",
                f"    c_opt = {_g(b.c_opt)}",
                f"    B_bar/V = {_g(b.slack)} (B_bar is the run's time-average drift constant, an empirical surrogate)",
                f"    upper check c_bar <= c_opt + B_bar/V + 3 SE: {'OK' if b.upper_ok else 'FAILED'}",
                f"    lower check c_bar >= c_opt - 3 SE: {'OK' if b.lower_ok else 'FAILED'}",
                f"    gap c_bar - c_opt = {_g(b.gap)}",
            ])
        elif point.oracle_note:
            lines.append(f"  cost bound: not available ({point.oracle_note})")
        lines.append("")

    if report.trends:
        lines.append("trends:")
        for trend in report.trends:
            lines.append(f"  {trend.description}: {'yes' if trend.holds else 'no'}")
        lines.append("")

    lines.append(f"all constraints satisfied: {'yes' if report.all_satisfied else 'no'}")
    return "\n".join(lines) + "\n"


def write_summary(report: ExperimentReport, path: Path) -> Path:
    path.write_text(render_summary(report), encoding="utf-8", newline="\n")
    return path
