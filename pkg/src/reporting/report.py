"""Result containers shared by the pipeline, the writers and the CLI."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from src.analysis.bounds import ConstraintVerdict, CostBoundCheck
from src.analysis.cmdp import OracleResult
from src.models.params import ExperimentSpec
from src.simulation.sweep import SweepResult


@dataclass
class PointReport:
    """Checks for one grid point, computed from replication means."""
    index: int
    label: str
    verdicts: list[ConstraintVerdict]
    queue_stable: list[Optional[bool]]
    bound: Optional[CostBoundCheck] = None
    oracle_note: Optional[str] = None  # set when the oracle could not run

    @property
    def satisfied(self) -> bool:
        return all(v.satisfied for v in self.verdicts)


@dataclass
class TrendCheck:
    """A monotonicity claim across the sweep axis, judged within noise."""
    description: str
    holds: bool


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    output_dir: Path
    result: SweepResult
    points: list[PointReport]
    trends: list[TrendCheck] = field(default_factory=list)
    oracles: dict[int, OracleResult] = field(default_factory=dict)  # by grid point
    files: list[Path] = field(default_factory=list)

    @property
    def all_satisfied(self) -> bool:
        return all(p.satisfied for p in self.points)


@dataclass
class UserOracleReport:
    user: int  # 1-based
    result: Optional[OracleResult]
    error: Optional[str] = None


@dataclass
class OracleReport:
    spec: ExperimentSpec
    users: list[UserOracleReport]
    experiment: Optional[ExperimentReport] = None
