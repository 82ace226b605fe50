"""Constrained-MDP oracle, stationary-policy evaluation and bound checks."""

from src.analysis.bounds import (
    ConstraintVerdict,
    CostBoundCheck,
    check_cost_bound,
    constraint_verdicts,
    monotone_within_noise,
    queue_stabilization,
)
from src.analysis.cmdp import (
    OracleResult,
    enumeration_optimum,
    evaluate_policy,
    relative_value_iteration,
    solve_constrained_mdp,
    solve_user_oracle,
)
from src.analysis.evaluation import evaluate_stationary
from src.analysis.mdp import TruncatedMdp, build_truncated_mdp

__all__ = [
    "ConstraintVerdict",
    "CostBoundCheck",
    "OracleResult",
    "TruncatedMdp",
    "build_truncated_mdp",
    "check_cost_bound",
    "constraint_verdicts",
    "enumeration_optimum",
    "evaluate_policy",
    "evaluate_stationary",
    "monotone_within_noise",
    "queue_stabilization",
    "relative_value_iteration",
    "solve_constrained_mdp",
    "solve_user_oracle",
]
