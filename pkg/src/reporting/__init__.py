"""Config loading, experiment orchestration and output files."""

from src.reporting.loader import apply_overrides, load_config, load_preset
from src.reporting.pipeline import run_experiment, run_oracle
from src.reporting.report import ExperimentReport, OracleReport

__all__ = [
    "ExperimentReport",
    "OracleReport",
    "apply_overrides",
    "load_config",
    "load_preset",
    "run_experiment",
    "run_oracle",
]
