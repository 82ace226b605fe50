"""
Constrained-MDP oracle for one user.

Minimizes the long-run average resource cost subject to a long-run
average age budget on the truncated MDP:

1. For each Lagrange multiplier lambda on a grid, relative value
   iteration finds a policy minimizing cost + lambda * age.
2. Each policy is evaluated exactly (its long-run state distribution
   from the initial state) for average age and average cost.
3. The smallest grid multiplier whose policy meets the budget is
   refined against its infeasible neighbour by log-bisection, and the
   two bracketing policies are time-shared so the budget holds with
   equality when that is cheaper.

A brute-force policy enumeration with a lower convex hull lives here
too; it is only practical for tiny truncations and is used to check
the multiplier search.
"""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from src.analysis.mdp import TruncatedMdp, build_truncated_mdp
from src.models.errors import (
    InfeasibleConstraintError,
    OracleError,
    TruncationError,
    ValueIterationError,
)
from src.models.params import OracleConfig, UserParams

logger = logging.getLogger(__name__)

DENSE_LIMIT = 200  # states; below this the limit matrix is found by squaring
AGE_SLACK = 1e-9  # a policy meets the budget if its age is within this of a_max
LAZY = 0.5  # self-loop weight of the aperiodicity transform


@dataclass(frozen=True)
class RviResult:
    policy: np.ndarray
    gain: float
    gain_lower: float
    gain_upper: float
    iterations: int


@dataclass(frozen=True)
class PolicyValue:
    avg_age: float
    avg_cost: float


@dataclass(frozen=True)
class LagrangianSolution:
    """Optimal deterministic policy for one multiplier, with its exact averages."""
    lam: float
    policy: np.ndarray
    gain: float
    avg_age: float
    avg_cost: float
    iterations: int

    @property
    def lagrangian(self) -> float:
        return self.avg_cost + self.lam * self.avg_age


@dataclass(frozen=True)
class OracleResult:
    """
    Constrained optimum for one user.

    `mixing_weight` is the long-run fraction of time spent under the
    infeasible-side policy; 0 means the feasible policy is used alone.
    """
    a_max: float
    a_cap: int
    c_opt: float
    achieved_age: float
    multiplier: float
    mixing_weight: float
    feasible: LagrangianSolution
    infeasible: Optional[LagrangianSolution]
    grid: tuple[LagrangianSolution, ...]


def default_lambda_grid(config: Optional[OracleConfig] = None) -> np.ndarray:
    config = config or OracleConfig()
    return np.geomspace(config.lambda_min, config.lambda_max, config.lambda_points)


def relative_value_iteration(
    mdp: TruncatedMdp,
    lam: float,
    tolerance: float = 1e-9,
    max_iterations: int = 200_000,
) -> RviResult:
    """
    Average-cost value iteration for cost + lam * age.

    Runs on the lazy chain (LAZY self-loop mixed into every transition),
    which has the same gain and optimal policies but is aperiodic. Stops
    when the span of the one-step differences falls below `tolerance`
    relative to the gain.
    """
    stage = mdp.cost + lam * mdp.age[:, None]
    h = np.zeros(mdp.n_states)

    for iteration in range(1, max_iterations + 1):
        expected = (mdp.prob * h[mdp.next_state]).sum(axis=2)
        q = stage + LAZY * expected + (1.0 - LAZY) * h[:, None]
        updated = q.min(axis=1)
        diff = updated - h
        lower, upper = float(diff.min()), float(diff.max())
        h = updated - updated[mdp.initial]
        if upper - lower < tolerance * max(1.0, abs(upper)):
            return RviResult(
                policy=q.argmin(axis=1),
                gain=(lower + upper) / 2.0,
                gain_lower=lower,
                gain_upper=upper,
                iterations=iteration,
            )

    raise ValueIterationError(
        f"relative value iteration did not converge in {max_iterations} iterations "
        f"(lambda={lam:g}, span={upper - lower:.3g})"
    )


def long_run_distribution(
    mdp: TruncatedMdp,
    policy: np.ndarray,
    tolerance: float = 1e-13,
    max_iterations: int = 1_000_000,
) -> np.ndarray:
    """Long-run state distribution of a deterministic policy started at the initial state."""
    rows = np.arange(mdp.n_states)
    successors = mdp.next_state[rows, policy]
    probs = mdp.prob[rows, policy]

    if mdp.n_states <= DENSE_LIMIT:
        transition = np.zeros((mdp.n_states, mdp.n_states))
        np.add.at(transition, (np.repeat(rows, 2), successors.ravel()), probs.ravel())
        limit = LAZY * np.eye(mdp.n_states) + (1.0 - LAZY) * transition
        for _ in range(64):
            squared = limit @ limit
            if np.abs(squared - limit).max() < tolerance:
                return squared[mdp.initial]
            limit = squared
        raise OracleError("long-run distribution did not converge")

    dist = np.zeros(mdp.n_states)
    dist[mdp.initial] = 1.0
    flat_successors = successors.ravel()
    for _ in range(max_iterations):
        moved = np.bincount(
            flat_successors,
            weights=(dist[:, None] * probs).ravel(),
            minlength=mdp.n_states,
        )
        updated = LAZY * dist + (1.0 - LAZY) * moved
        if np.abs(updated - dist).sum() < tolerance:
            return updated
        dist = updated
    raise OracleError("long-run distribution did not converge")


def evaluate_policy(mdp: TruncatedMdp, policy: np.ndarray) -> PolicyValue:
    """Exact long-run average age and cost of a deterministic policy."""
    rows = np.arange(mdp.n_states)
    stage_cost = mdp.cost[rows, policy]
    if not np.all(np.isfinite(stage_cost)):
        raise ValueError("policy retransmits from a state with nothing pending")
    dist = long_run_distribution(mdp, policy)
    return PolicyValue(
        avg_age=float(dist @ mdp.age),
        avg_cost=float(dist @ stage_cost),
    )


def solve_lagrangian(
    mdp: TruncatedMdp,
    lam: float,
    tolerance: float = 1e-9,
    max_iterations: int = 200_000,
) -> LagrangianSolution:
    rvi = relative_value_iteration(mdp, lam, tolerance, max_iterations)
    value = evaluate_policy(mdp, rvi.policy)
    return LagrangianSolution(
        lam=float(lam),
        policy=rvi.policy,
        gain=rvi.gain,
        avg_age=value.avg_age,
        avg_cost=value.avg_cost,
        iterations=rvi.iterations,
    )


def _solve_args(args: tuple[TruncatedMdp, float, float, int]) -> LagrangianSolution:
    return solve_lagrangian(*args)


def solve_grid(
    mdp: TruncatedMdp,
    lambdas: Sequence[float],
    tolerance: float = 1e-9,
    max_iterations: int = 200_000,
    max_workers: int = 1,
) -> list[LagrangianSolution]:
    """Solve the Lagrangian problem at every multiplier, in grid order."""
    args = [(mdp, float(lam), tolerance, max_iterations) for lam in lambdas]
    if max_workers <= 1 or len(args) <= 1:
        return [_solve_args(a) for a in args]
    with ProcessPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(_solve_args, args))


def _meets(solution: LagrangianSolution, a_max: float) -> bool:
    return solution.avg_age <= a_max + AGE_SLACK


def check_oracle_inputs(params: UserParams, a_max: float, a_cap: int) -> None:
    """Raise if the budget is unreachable or the truncation too small."""
    if a_max < params.min_average_age - AGE_SLACK:
        raise InfeasibleConstraintError(a_max, params.min_average_age)
    if a_cap < 3 * a_max:
        raise TruncationError(f"age cap {a_cap} is below 3 x budget ({3 * a_max:g})")


def solve_constrained_mdp(
    mdp: TruncatedMdp,
    a_max: float,
    lambdas: Optional[Sequence[float]] = None,
    tolerance: float = 1e-9,
    max_iterations: int = 200_000,
    refine_steps: int = 40,
    max_workers: int = 1,
) -> OracleResult:
    """Minimum average cost subject to average age <= a_max."""
    check_oracle_inputs(mdp.params, a_max, mdp.a_cap)

    lambdas = default_lambda_grid() if lambdas is None else np.asarray(lambdas, dtype=float)
    if len(lambdas) == 0 or np.any(lambdas < 0) or np.any(np.diff(lambdas) <= 0):
        raise ValueError("lambda grid must be nonempty, nonnegative and strictly increasing")

    grid = solve_grid(mdp, lambdas, tolerance, max_iterations, max_workers)
    first = next((k for k, sol in enumerate(grid) if _meets(sol, a_max)), None)
    if first is None:
        raise OracleError(
            f"no multiplier up to {lambdas[-1]:g} meets the age budget {a_max:g}; "
            "raise lambda_max"
        )

    hi = grid[first]
    lo = grid[first - 1] if first > 0 else None
    if lo is not None:
        for _ in range(refine_steps):
            mid = math.sqrt(lo.lam * hi.lam) if lo.lam > 0 else (lo.lam + hi.lam) / 2.0
            sol = solve_lagrangian(mdp, mid, tolerance, max_iterations)
            if _meets(sol, a_max):
                hi = sol
            else:
                lo = sol

    c_opt, achieved_age, weight = hi.avg_cost, hi.avg_age, 0.0
    if lo is not None and lo.avg_age > hi.avg_age:
        theta = (a_max - hi.avg_age) / (lo.avg_age - hi.avg_age)
        theta = min(max(theta, 0.0), 1.0)
        mixed_cost = theta * lo.avg_cost + (1.0 - theta) * hi.avg_cost
        if mixed_cost < c_opt:
            c_opt = mixed_cost
            achieved_age = theta * lo.avg_age + (1.0 - theta) * hi.avg_age
            weight = theta

    logger.info(
        "Oracle p=%g a_max=%g cap=%d: c_opt=%.9g age=%.9g lambda=%.6g mix=%.4g",
        mdp.params.p, a_max, mdp.a_cap, c_opt, achieved_age, hi.lam, weight,
    )
    return OracleResult(
        a_max=a_max,
        a_cap=mdp.a_cap,
        c_opt=c_opt,
        achieved_age=achieved_age,
        multiplier=hi.lam,
        mixing_weight=weight,
        feasible=hi,
        infeasible=lo,
        grid=tuple(grid),
    )


def solve_user_oracle(
    params: UserParams,
    config: Optional[OracleConfig] = None,
    max_workers: int = 1,
) -> OracleResult:
    """Build the truncated MDP for one user's constants and solve it."""
    config = config or OracleConfig()
    a_cap = math.ceil(config.a_cap_factor * params.a_max)
    check_oracle_inputs(params, params.a_max, a_cap)
    mdp = build_truncated_mdp(params, a_cap)
    logger.debug("Truncated MDP: %d states, a_cap=%d", mdp.n_states, a_cap)
    return solve_constrained_mdp(
        mdp,
        params.a_max,
        lambdas=default_lambda_grid(config),
        tolerance=config.tolerance,
        max_iterations=config.max_iterations,
        refine_steps=config.refine_steps,
        max_workers=max_workers,
    )


def enumerate_deterministic_policies(mdp: TruncatedMdp) -> Iterator[np.ndarray]:
    """Every deterministic policy using only allowed actions."""
    choices = [mdp.allowed_actions(s) for s in range(mdp.n_states)]
    for combo in itertools.product(*choices):
        yield np.array(combo, dtype=np.int64)


def hull_optimum(points: Sequence[tuple[float, float]], a_max: float) -> float:
    """
    Cheapest cost reachable by time-sharing the given (age, cost) points
    with average age at most a_max.
    """
    pts = sorted(set(points))
    hull: list[tuple[float, float]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (pt[1] - y0) - (y1 - y0) * (pt[0] - x0) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)

    best = math.inf
    for x, c in hull:
        if x <= a_max + AGE_SLACK:
            best = min(best, c)
    for (x0, c0), (x1, c1) in zip(hull, hull[1:]):
        if x0 <= a_max < x1:
            best = min(best, c0 + (c1 - c0) * (a_max - x0) / (x1 - x0))
    if math.isinf(best):
        raise InfeasibleConstraintError(a_max, pts[0][0] if pts else math.inf)
    return best


def enumeration_optimum(mdp: TruncatedMdp, a_max: float) -> float:
    """Constrained optimum by evaluating every deterministic policy."""
    points = []
    for policy in enumerate_deterministic_policies(mdp):
        value = evaluate_policy(mdp, policy)
        points.append((round(value.avg_age, 12), round(value.avg_cost, 12)))
    return hull_optimum(points, a_max)
