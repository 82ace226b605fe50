import pytest

from src.models.params import UserParams


@pytest.fixture
def two_users() -> list[UserParams]:
    """The two-user setup used throughout: p=(0.6, 0.9), budgets 5."""
    return [UserParams(p=0.6, a_max=5), UserParams(p=0.9, a_max=5)]


@pytest.fixture
def small_dpp_config() -> dict:
    return {
        "users": [{"p": 0.6, "a_max": 5}, {"p": 0.9, "a_max": 5}],
        "policy": {"kind": "dpp", "v": 50},
        "horizon": 2_000,
        "seed": 11,
        "replications": 2,
        "metrics_stride": 1,
    }


@pytest.fixture
def spec_data(tmp_path):
    """Factory for a small two-user V-sweep experiment writing under tmp_path."""

    def make(**overrides) -> dict:
        data = {
            "name": "small",
            "simulation": {
                "users": [{"p": 0.6, "a_max": 5}, {"p": 0.9, "a_max": 5}],
                "policy": {"kind": "dpp", "v": 50},
                "horizon": 3_000,
                "seed": 3,
                "replications": 3,
                "metrics_stride": 50,
            },
            "sweep": {"kind": "v", "values": [1, 50]},
            "output_dir": str(tmp_path / "out"),
        }
        data.update(overrides)
        return data

    return make
