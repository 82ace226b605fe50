"""
Configuration models.

Per-user constants, policy selectors, simulation and experiment
settings. These are validated once at the edge (config files, CLI
overrides) and are immutable afterwards.
"""

from typing import Annotated, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from src.models.errors import ConfigValidationError


MAX_SEED = 2**64


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class UserParams(_Frozen):
    """Per-user channel and cost constants."""
    p: float = Field(ge=0.0, le=1.0)  # per-attempt success probability
    a_max: float = Field(gt=0.0)  # time-average age budget, slots
    c_sample: float = Field(default=1.0, ge=0.0)
    c_transmit: float = Field(default=1.0, ge=0.0)

    @property
    def min_average_age(self) -> float:
        """Smallest achievable average age: sample every slot."""
        return 1.0 / self.p if self.p > 0 else float("inf")


class DppConfig(_Frozen):
    """Drift-plus-penalty policy with penalty weight V."""
    kind: Literal["dpp"] = "dpp"
    v: float = Field(ge=0.0)


class GreedyMaxAgeConfig(_Frozen):
    """Always sample the user furthest over its age budget (ratio A/A_max)."""
    kind: Literal["greedy_max_age"] = "greedy_max_age"


class StationaryPolicy(_Frozen):
    """
    Randomized stationary policy.

    Each slot one categorical draw picks at most one option: sample user i
    with probability q_sample[i], retransmit for user i with probability
    q_retransmit[i], otherwise idle. A retransmit option drawn for a user
    with nothing pending idles instead.
    """
    kind: Literal["stationary"] = "stationary"
    q_sample: tuple[float, ...] = Field(min_length=1)
    q_retransmit: tuple[float, ...] = ()

    @field_validator("q_sample", "q_retransmit")
    @classmethod
    def _nonnegative(cls, values: tuple[float, ...]) -> tuple[float, ...]:
        for q in values:
            if q < 0.0:
                raise ValueError("probabilities must be nonnegative")
        return values

    @model_validator(mode="after")
    def _total_mass(self) -> "StationaryPolicy":
        if self.q_retransmit and len(self.q_retransmit) != len(self.q_sample):
            raise ValueError("q_retransmit must have one entry per user")
        total = sum(self.q_sample) + sum(self.q_retransmit)
        if total > 1.0 + 1e-12:
            raise ValueError(f"total activation probability {total:g} exceeds 1")
        return self

    @property
    def retransmit_probabilities(self) -> tuple[float, ...]:
        return self.q_retransmit or tuple(0.0 for _ in self.q_sample)


PolicyConfig = Annotated[
    Union[DppConfig, GreedyMaxAgeConfig, StationaryPolicy],
    Field(discriminator="kind"),
]


class SimConfig(_Frozen):
    """One simulation point: users, policy, horizon and seeding."""
    users: tuple[UserParams, ...] = Field(min_length=1)
    policy: PolicyConfig
    horizon: int = Field(default=1_000_000, ge=1)
    seed: int = Field(default=0, ge=0, lt=MAX_SEED)
    replications: int = Field(default=20, ge=1)
    metrics_stride: int = Field(default=100, ge=1)

    @model_validator(mode="after")
    def _policy_matches_users(self) -> "SimConfig":
        if isinstance(self.policy, StationaryPolicy):
            if len(self.policy.q_sample) != len(self.users):
                raise ValueError(
                    f"stationary policy lists {len(self.policy.q_sample)} users, "
                    f"simulation has {len(self.users)}"
                )
        return self

    @property
    def n_users(self) -> int:
        return len(self.users)


class VSweep(_Frozen):
    """Sweep over the DPP penalty weight."""
    kind: Literal["v"] = "v"
    values: tuple[float, ...] = Field(min_length=1)

    @field_validator("values")
    @classmethod
    def _nonnegative(cls, values: tuple[float, ...]) -> tuple[float, ...]:
        if any(v < 0 for v in values):
            raise ValueError("V values must be nonnegative")
        return values


class ProbabilitySweep(_Frozen):
    """
    Sweep over success probabilities.

    Each grid point is either one probability applied to every user or
    one probability per user.
    """
    kind: Literal["p"] = "p"
    values: tuple[tuple[float, ...], ...] = Field(min_length=1)

    @field_validator("values", mode="before")
    @classmethod
    def _promote_scalars(cls, values):
        if isinstance(values, (list, tuple)):
            return [v if isinstance(v, (list, tuple)) else [v] for v in values]
        return values

    @field_validator("values")
    @classmethod
    def _probabilities(cls, values):
        for point in values:
            if not point:
                raise ValueError("empty probability point")
            for p in point:
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"probability {p:g} outside [0, 1]")
        return values


SweepAxis = Annotated[Union[VSweep, ProbabilitySweep], Field(discriminator="kind")]


class OracleConfig(_Frozen):
    """Settings for the single-user constrained-MDP oracle."""
    a_cap_factor: float = Field(default=10.0, ge=3.0)
    lambda_min: float = Field(default=1e-3, gt=0.0)
    lambda_max: float = Field(default=1e3, gt=0.0)
    lambda_points: int = Field(default=61, ge=2)
    refine_steps: int = Field(default=40, ge=0)
    tolerance: float = Field(default=1e-9, gt=0.0)
    max_iterations: int = Field(default=200_000, ge=1)

    @model_validator(mode="after")
    def _ordered(self) -> "OracleConfig":
        if self.lambda_max <= self.lambda_min:
            raise ValueError("lambda_max must exceed lambda_min")
        return self


OutputFormat = Literal["trace", "sweep", "summary"]


class ExperimentSpec(_Frozen):
    """A named experiment: base simulation, optional sweep, outputs."""
    name: str = Field(min_length=1)
    simulation: SimConfig
    sweep: Optional[SweepAxis] = None
    output_dir: Optional[str] = None
    formats: tuple[OutputFormat, ...] = ("trace", "sweep", "summary")
    age_tolerance: float = Field(default=0.05, ge=0.0)
    oracle: OracleConfig = OracleConfig()

    @field_validator("name")
    @classmethod
    def _name_not_blank(cls, name: str) -> str:
        cleaned = name.strip()
        if not cleaned:
            raise ValueError("name must not be blank")
        return cleaned

    @model_validator(mode="after")
    def _sweep_matches_policy(self) -> "ExperimentSpec":
        if isinstance(self.sweep, VSweep) and not isinstance(self.simulation.policy, DppConfig):
            raise ValueError("a V sweep requires the dpp policy")
        if isinstance(self.sweep, ProbabilitySweep):
            n = self.simulation.n_users
            for point in self.sweep.values:
                if len(point) not in (1, n):
                    raise ValueError(
                        f"probability point {list(point)} must have 1 or {n} entries"
                    )
        return self


def format_validation_error(exc: ValidationError) -> list[str]:
    """Turn pydantic errors into "field.path: message" lines."""
    problems = []
    for err in exc.errors():
        path = ".".join(str(part) for part in err["loc"]) or "<root>"
        problems.append(f"{path}: {err['msg']}")
    return problems


def parse_sim_config(data: Union[SimConfig, dict]) -> SimConfig:
    """Accept a SimConfig or a raw mapping; raise ConfigValidationError on bad input."""
    if isinstance(data, SimConfig):
        return data
    try:
        return SimConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigValidationError(format_validation_error(exc)) from exc
