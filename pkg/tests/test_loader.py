import json

import pytest

from src.models.errors import ConfigNotFoundError, ConfigParseError, ConfigValidationError
from src.models.params import DppConfig, ProbabilitySweep, VSweep
from src.reporting.loader import apply_overrides, load_config, load_preset


def write(tmp_path, data) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


def test_minimal_config_gets_defaults(tmp_path):
    spec = load_config(write(tmp_path, {
        "name": "minimal",
        "simulation": {"users": [{"p": 0.9, "a_max": 5}], "policy": {"kind": "dpp", "v": 100}},
    }))
    sim = spec.simulation
    assert sim.horizon == 1_000_000
    assert sim.replications == 20
    assert sim.metrics_stride == 100
    assert sim.seed == 0
    assert sim.users[0].c_sample == 1.0 and sim.users[0].c_transmit == 1.0
    assert sim.policy == DppConfig(v=100)
    assert spec.age_tolerance == 0.05
    assert spec.oracle.lambda_points == 61
    assert spec.formats == ("trace", "sweep", "summary")


def test_out_of_range_probability_names_the_field(tmp_path):
    with pytest.raises(ConfigValidationError) as exc_info:
        load_config(write(tmp_path, {
            "name": "bad",
            "simulation": {"users": [{"p": 1.5, "a_max": 5}], "policy": {"kind": "dpp", "v": 1}},
        }))
    assert any(problem.startswith("simulation.users.0.p") for problem in exc_info.value.problems)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigNotFoundError):
        load_config(tmp_path / "nope.json")


def test_malformed_json(tmp_path):
    with pytest.raises(ConfigParseError):
        load_config(write(tmp_path, "{not json"))


def test_unknown_field_rejected(tmp_path):
    with pytest.raises(ConfigValidationError):
        load_config(write(tmp_path, {
            "name": "x",
            "simulation": {"users": [{"p": 0.5, "a_max": 5, "colour": 1}], "policy": {"kind": "dpp", "v": 1}},
        }))


def test_v_sweep_requires_dpp(tmp_path):
    with pytest.raises(ConfigValidationError):
        load_config(write(tmp_path, {
            "name": "x",
            "simulation": {"users": [{"p": 0.5, "a_max": 5}], "policy": {"kind": "greedy_max_age"}},
            "sweep": {"kind": "v", "values": [1, 2]},
        }))


def test_blank_name_rejected(tmp_path):
    with pytest.raises(ConfigValidationError):
        load_config(write(tmp_path, {
            "name": "  ",
            "simulation": {"users": [{"p": 0.5, "a_max": 5}], "policy": {"kind": "dpp", "v": 1}},
        }))


def test_fig1_preset():
    spec = load_preset("fig1")
    assert [u.p for u in spec.simulation.users] == [0.6, 0.9]
    assert [u.a_max for u in spec.simulation.users] == [5, 5]
    assert spec.sweep == VSweep(values=(1, 50, 100, 300))


def test_fig2_preset():
    spec = load_preset("fig2")
    assert spec.sweep.values == (1, 10, 50, 100, 300)


def test_fig3_preset():
    spec = load_preset("fig3")
    assert spec.simulation.policy == DppConfig(v=200)
    assert [u.a_max for u in spec.simulation.users] == [9, 8]
    assert isinstance(spec.sweep, ProbabilitySweep)
    assert [point[0] for point in spec.sweep.values] == [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]


def test_unknown_preset():
    with pytest.raises(ConfigNotFoundError):
        load_preset("fig9")


def test_overrides():
    spec = apply_overrides(load_preset("fig1"), output_dir="x", seed=7, horizon=100, replications=2)
    assert spec.output_dir == "x"
    assert spec.simulation.seed == 7
    assert spec.simulation.horizon == 100
    assert spec.simulation.replications == 2


def test_invalid_override():
    with pytest.raises(ConfigValidationError):
        apply_overrides(load_preset("fig1"), horizon=0)
