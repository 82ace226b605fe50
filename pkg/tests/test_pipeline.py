import json

import pandas as pd
import pytest

from src.main import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main
from src.reporting.loader import parse_spec
from src.reporting.pipeline import run_experiment, run_oracle
from src.reporting.writers import TRACE_COLUMNS
from src.settings import RuntimeSettings


@pytest.fixture
def serial(monkeypatch) -> RuntimeSettings:
    monkeypatch.setenv("AOI_MAX_WORKERS", "1")
    return RuntimeSettings()


def test_run_experiment_writes_files(spec_data, serial):
    report = run_experiment(parse_spec(spec_data()), serial)
    names = sorted(path.name for path in report.files)
    assert names == ["summary.txt", "sweep.csv", "trace.csv"]

    trace = pd.read_csv(report.output_dir / "trace.csv")
    assert list(trace.columns) == TRACE_COLUMNS
    assert set(trace["point"]) == {0, 1}
    assert set(trace["user"]) == {1, 2}
    assert (trace["replication"] == 0).all()
    assert len(trace) == 2 * 2 * (3_000 // 50)

    sweep = pd.read_csv(report.output_dir / "sweep.csv")
    assert list(sweep.columns) == ["point", "label", "v", "p", "metric", "user", "mean", "std", "n"]
    for metric in ("avg_age", "transmission_rate", "sampling_rate", "avg_queue", "settle_slot"):
        assert len(sweep[(sweep["metric"] == metric)]) == 4


def test_summary_verdicts_match_sweep_csv(spec_data, serial):
    report = run_experiment(parse_spec(spec_data()), serial)
    sweep = pd.read_csv(report.output_dir / "sweep.csv", dtype={"user": str})
    summary = (report.output_dir / "summary.txt").read_text()

    for point in report.points:
        for verdict in point.verdicts:
            row = sweep[
                (sweep["point"] == point.index)
                & (sweep["metric"] == "avg_age")
                & (sweep["user"] == str(verdict.user))
            ].iloc[0]
            assert verdict.satisfied == (row["mean"] <= verdict.a_max * (1 + verdict.tolerance))
            assert str(verdict) in summary


def test_reruns_are_byte_identical(spec_data, serial, tmp_path):
    first = run_experiment(parse_spec(spec_data(output_dir=str(tmp_path / "a"))), serial)
    second = run_experiment(parse_spec(spec_data(output_dir=str(tmp_path / "b"))), serial)
    for name in ("trace.csv", "sweep.csv", "summary.txt"):
        assert (first.output_dir / name).read_bytes() == (second.output_dir / name).read_bytes()


def test_worker_count_does_not_change_outputs(spec_data, tmp_path):
    one = run_experiment(parse_spec(spec_data(output_dir=str(tmp_path / "one"))), RuntimeSettings(max_workers=1))
    two = run_experiment(parse_spec(spec_data(output_dir=str(tmp_path / "two"))), RuntimeSettings(max_workers=2))
    for name in ("trace.csv", "sweep.csv", "summary.txt"):
        assert (one.output_dir / name).read_bytes() == (two.output_dir / name).read_bytes()


def test_formats_limit_outputs(spec_data, serial):
    report = run_experiment(parse_spec(spec_data(formats=["sweep"])), serial)
    assert [path.name for path in report.files] == ["sweep.csv"]


def test_single_user_dpp_gets_bound_report(spec_data, serial):
    data = spec_data()
    data["simulation"]["users"] = [{"p": 0.6, "a_max": 5}]
    data["sweep"] = {"kind": "v", "values": [100, 300]}
    report = run_experiment(parse_spec(data), serial)
    assert all(point.bound is not None for point in report.points)
    assert report.oracles[0].c_opt == report.oracles[1].c_opt
    summary = (report.output_dir / "summary.txt").read_text()
    assert "c_opt" in summary
    assert "empirical surrogate" in summary


def test_oracle_report_for_infeasible_user(spec_data, serial):
    data = spec_data(formats=["sweep"])
    data["simulation"]["users"] = [{"p": 0.5, "a_max": 1.5}]
    data["sweep"] = None
    report = run_oracle(parse_spec(data), serial)
    assert report.users[0].result is None
    assert "infeasible" in report.users[0].error
    assert report.experiment is not None
    assert report.experiment.points[0].bound is None


def test_output_dir_falls_back_to_env(spec_data, monkeypatch, tmp_path):
    monkeypatch.setenv("AOI_OUTPUT_DIR", str(tmp_path / "env"))
    monkeypatch.setenv("AOI_MAX_WORKERS", "1")
    data = spec_data(formats=["summary"])
    data.pop("output_dir")
    report = run_experiment(parse_spec(data), RuntimeSettings())
    assert report.output_dir == tmp_path / "env" / "small"
    assert (report.output_dir / "summary.txt").exists()


def write_config(tmp_path, data) -> str:
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_cli_run(spec_data, tmp_path, monkeypatch):
    monkeypatch.setenv("AOI_MAX_WORKERS", "1")
    assert main(["run", write_config(tmp_path, spec_data())]) == EXIT_OK
    assert (tmp_path / "out" / "sweep.csv").exists()


def test_cli_config_errors(tmp_path, spec_data):
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    bad = spec_data()
    bad["simulation"]["users"][0]["p"] = 1.5
    assert main(["run", write_config(tmp_path, bad)]) == EXIT_CONFIG


def test_cli_oracle_infeasible_exits_nonzero(tmp_path, spec_data, monkeypatch):
    monkeypatch.setenv("AOI_MAX_WORKERS", "1")
    data = spec_data(formats=["summary"])
    data["simulation"]["users"] = [{"p": 0.5, "a_max": 1.5}]
    data["sweep"] = None
    assert main(["oracle", write_config(tmp_path, data)]) == EXIT_FAILURE


def test_cli_preset_determinism(tmp_path, monkeypatch):
    monkeypatch.setenv("AOI_MAX_WORKERS", "1")
    args = ["--seed", "7", "--horizon", "2000", "--replications", "2"]
    assert main(["preset", "fig1", "--out", str(tmp_path / "a"), *args]) == EXIT_OK
    assert main(["preset", "fig1", "--out", str(tmp_path / "b"), *args]) == EXIT_OK
    for name in ("trace.csv", "sweep.csv", "summary.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
