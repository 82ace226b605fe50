"""
Exception hierarchy for the scheduler, simulator and oracle.

Every error the library raises derives from AoiError so the CLI can
map the whole family to an exit status in one place.
"""


class AoiError(Exception):
    """Base class for all scheduler/simulator errors."""
    pass


class InconsistentStateError(AoiError):
    """Raised when dynamics are asked to do something the state cannot support."""
    pass


class InfeasibleActionError(AoiError):
    """Raised when an action violates the interference or buffer rules."""
    pass


class ConfigError(AoiError):
    """Base class for configuration loading failures."""
    pass


class ConfigNotFoundError(ConfigError):
    """The config file (or preset) does not exist."""
    pass


class ConfigParseError(ConfigError):
    """The config file is not valid JSON."""
    pass


class ConfigValidationError(ConfigError):
    """
    The config parsed but a field is out of range.

    `problems` holds one "field.path: message" string per violation.
    """

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("Invalid configuration:\n  " + "\n  ".join(problems))


class OracleError(AoiError):
    """Base class for constrained-MDP oracle failures."""
    pass


class ValueIterationError(OracleError):
    """Relative value iteration did not converge within the iteration cap."""
    pass


class InfeasibleConstraintError(OracleError):
    """The age budget is below the minimum achievable average age."""

    def __init__(self, a_max: float, min_age: float):
        self.a_max = a_max
        self.min_age = min_age
        super().__init__(
            f"Age budget {a_max:g} is infeasible: the minimum achievable "
            f"average age is {min_age:.6g} slots."
        )


class TruncationError(OracleError):
    """The age cap is too small relative to the age budget."""
    pass
