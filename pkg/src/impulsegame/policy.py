"""Howard policy iteration over the row-decoupled per-node controls.

Each node carries four discrete decisions: does the minimizer intervene
(p), does the maximizer intervene given the minimizer does not (q), and
which impulse either player would apply.  Policy evaluation solves the
tridiagonal system with the branch values pinned by the policy; policy
improvement re-optimizes the impulses through the intervention scans and
flips the flags by strict branch comparison (ties resolve to no
intervention, keeping the all-zero policy stationary on the zero game).

Because both obstacles are evaluated on the previous backward level, the
improvement step does not depend on the current iterate at all, so the
iteration is stationary after at most two sweeps and its value row
coincides with the direct min/max timestep.  The timestep operator carries
no policy dependence either; the policy-indexed signatures are kept for
symmetry with direct-control discretizations, and the operator is
assembled once per time level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import ImpulseTable, interpolate
from .problem import GameProblem, Grids, evaluate_coefficient
from .scheme import assemble_matrix, assemble_rhs, solve_tridiagonal

__all__ = [
    "PolicySnapshot",
    "HowardReport",
    "policy_rhs",
    "policy_evaluation",
    "policy_improvement",
    "howard_step",
]


@dataclass(frozen=True)
class PolicySnapshot:
    """Per-node discrete decisions of both players at one time level.

    ``maximizer_impulse`` / ``minimizer_impulse`` hold the impulse each
    player would apply; entries are only meaningful where the matching flag
    is set (NaN marks nodes whose impulse set is empty).
    """

    minimizer_acts: np.ndarray
    maximizer_acts: np.ndarray
    maximizer_impulse: np.ndarray
    minimizer_impulse: np.ndarray

    def same_action(self, other: "PolicySnapshot") -> bool:
        """Whether two snapshots prescribe identical interventions."""
        if not np.array_equal(self.minimizer_acts, other.minimizer_acts):
            return False
        if not np.array_equal(self.maximizer_acts, other.maximizer_acts):
            return False
        q = self.maximizer_acts
        p = self.minimizer_acts
        return bool(
            np.array_equal(self.maximizer_impulse[q], other.maximizer_impulse[q])
            and np.array_equal(self.minimizer_impulse[p], other.minimizer_impulse[p])
        )


@dataclass(frozen=True)
class HowardReport:
    iterations: int
    residual: float
    converged: bool


def _initial_policy(n_nodes: int) -> PolicySnapshot:
    return PolicySnapshot(
        minimizer_acts=np.zeros(n_nodes, dtype=bool),
        maximizer_acts=np.zeros(n_nodes, dtype=bool),
        maximizer_impulse=np.full(n_nodes, np.nan),
        minimizer_impulse=np.full(n_nodes, np.nan),
    )


def policy_rhs(
    policy: PolicySnapshot,
    n: int,
    v_prev: np.ndarray,
    problem: GameProblem,
    grids: Grids,
) -> np.ndarray:
    """Branch selection at the policy's fixed impulses (no re-optimization).

    y_i = (1-p)(1-q) * continuation_i + (1-p) q * sup-branch_i(xi_i)
        + p * inf-branch_i(eta_i).
    """
    h = grids.temporal.h
    t = float(grids.temporal.nodes[n])
    nodes = grids.spatial.nodes
    disc = problem.step_discount(h)

    foot = nodes + h * evaluate_coefficient(problem.drift, t, nodes)
    continuation = disc * interpolate(v_prev, grids.spatial, foot) + h * evaluate_coefficient(
        problem.running_reward, t, nodes
    )
    with np.errstate(invalid="ignore"):
        sup_branch = disc * interpolate(v_prev, grids.spatial, nodes + policy.maximizer_impulse) - (
            evaluate_coefficient(problem.maximizer_cost, t, policy.maximizer_impulse)
        )
        inf_branch = disc * interpolate(v_prev, grids.spatial, nodes + policy.minimizer_impulse) + (
            evaluate_coefficient(problem.minimizer_cost, t, policy.minimizer_impulse)
        )
    return np.where(
        policy.minimizer_acts,
        inf_branch,
        np.where(policy.maximizer_acts, sup_branch, continuation),
    )


def policy_evaluation(
    policy: PolicySnapshot,
    n: int,
    v_prev: np.ndarray,
    problem: GameProblem,
    grids: Grids,
) -> np.ndarray:
    """Solve the linear system at a fixed policy (operator is policy-independent)."""
    operator = assemble_matrix(n, problem, grids)
    return solve_tridiagonal(operator, policy_rhs(policy, n, v_prev, problem, grids))


def policy_improvement(
    v_n: np.ndarray,
    n: int,
    v_prev: np.ndarray,
    problem: GameProblem,
    grids: Grids,
    tables: "tuple[ImpulseTable, ImpulseTable] | None" = None,
) -> PolicySnapshot:
    """Nodewise re-optimization of all four decisions.

    q flips on only where the re-optimized sup branch strictly beats the
    continuation, p only where the re-optimized inf branch is strictly
    below the inner max.  Both obstacles read the previous backward level,
    so the result does not depend on ``v_n``; the argument is kept for the
    standard improvement signature.
    """
    del v_n
    rhs = assemble_rhs(n, v_prev, problem, grids, tables)
    q = rhs.sup_value > rhs.continuation
    p = rhs.inf_value < np.maximum(rhs.continuation, rhs.sup_value)
    return PolicySnapshot(
        minimizer_acts=p,
        maximizer_acts=q,
        maximizer_impulse=rhs.sup_impulse,
        minimizer_impulse=rhs.inf_impulse,
    )


def howard_step(
    n: int,
    v_prev: np.ndarray,
    problem: GameProblem,
    grids: Grids,
    tol: float = 1e-9,
    max_iters: int = 10,
    tables: "tuple[ImpulseTable, ImpulseTable] | None" = None,
) -> tuple[np.ndarray, PolicySnapshot, HowardReport]:
    """Alternate evaluation and improvement at one time level until stationary.

    With explicit obstacles the improvement is iterate-independent, so the
    loop stops after at most two sweeps; hitting ``max_iters`` signals an
    implementation bug rather than a tuning problem and is reported via
    ``converged=False``.
    """
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    policy = _initial_policy(grids.spatial.intervals + 1)
    row = policy_evaluation(policy, n, v_prev, problem, grids)
    iterations = 0
    residual = np.inf
    converged = False
    while iterations < max_iters:
        iterations += 1
        improved = policy_improvement(row, n, v_prev, problem, grids, tables)
        if improved.same_action(policy):
            residual = 0.0
            converged = True
            break
        new_row = policy_evaluation(improved, n, v_prev, problem, grids)
        residual = float(np.max(np.abs(new_row - row)))
        policy, row = improved, new_row
        if residual <= tol:
            converged = True
            break
    return row, policy, HowardReport(iterations=iterations, residual=residual, converged=converged)
