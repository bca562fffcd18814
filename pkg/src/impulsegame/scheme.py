"""Backward-in-time double-obstacle timestep and full-field solve.

At each backward level n (time tau_n = T - n*h) the value row solves the
tridiagonal linear system

    A V^n = y,    A = I - (h/2) diag(sigma_n^2) D2,

where D2 is the centered second difference with zero boundary rows (rows 0
and M of A are identity rows), and the right-hand side applies the
double-obstacle selection nodewise:

    y_i = min( max( disc * interp(V^{n-1}, x_i + h b_i) + h f_i,
                    sup-obstacle_i ), inf-obstacle_i ),

with both obstacles evaluated on the previous backward level (explicit
obstacles) and disc = exp(-rate*h).  Interior rows of A are strictly
diagonally dominant Z-rows with unit row sums, so the direct tridiagonal
elimination below needs no pivoting.

The recursion starts from V^0 = g at the grid nodes and is inherently
sequential across levels; within one level the rhs assembly is vectorized
over nodes.  ``residual`` re-evaluates the discrete double-obstacle
equation (with the half-step diffusion correction on the obstacle
branches) on any field and reports the per-level sup norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import ImpulseTable, interpolate, second_difference
from .problem import GameProblem, Grids, evaluate_coefficient, evaluate_terminal

__all__ = [
    "CONTINUATION",
    "MAXIMIZER",
    "MINIMIZER",
    "BRANCH_LABELS",
    "SolverError",
    "TridiagonalOperator",
    "SchemeStepReport",
    "RhsAssembly",
    "SolveResult",
    "omicron",
    "omicron_row",
    "assemble_matrix",
    "assemble_rhs",
    "solve_tridiagonal",
    "step",
    "solve",
    "residual",
]

CONTINUATION = 0
MAXIMIZER = 1
MINIMIZER = 2
BRANCH_LABELS = {CONTINUATION: "C", MAXIMIZER: "MAX", MINIMIZER: "MIN"}

_PIVOT_FLOOR = 1e-14


class SolverError(RuntimeError):
    """Raised when the linear solve hits a degenerate pivot (corrupted operator)."""


@dataclass(frozen=True)
class TridiagonalOperator:
    """A = I - (h/2) diag(sigma^2) D2 stored as three diagonals.

    ``sub[0]`` and ``sup[m]`` are unused and kept at zero.  Rows 0 and M are
    identity rows; every interior row has main = 1 + h*sigma_i^2/dx^2 and
    off-diagonals -h*sigma_i^2/(2 dx^2), hence strict diagonal dominance and
    unit row sums.
    """

    sub: np.ndarray
    main: np.ndarray
    sup: np.ndarray

    @property
    def size(self) -> int:
        return self.main.size

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.main * v
        out[1:] += self.sub[1:] * v[:-1]
        out[:-1] += self.sup[:-1] * v[1:]
        return out

    def to_dense(self) -> np.ndarray:
        dense = np.diag(self.main)
        dense += np.diag(self.sub[1:], k=-1)
        dense += np.diag(self.sup[:-1], k=1)
        return dense


@dataclass(frozen=True)
class SchemeStepReport:
    """Per-timestep diagnostics: branch activity counts and solve residual."""

    time_index: int
    continuation_nodes: int
    maximizer_nodes: int
    minimizer_nodes: int
    solve_residual: float

    @property
    def total_nodes(self) -> int:
        return self.continuation_nodes + self.maximizer_nodes + self.minimizer_nodes


@dataclass(frozen=True)
class RhsAssembly:
    """Right-hand side of one timestep with per-node branch provenance."""

    y: np.ndarray
    continuation: np.ndarray
    sup_value: np.ndarray
    sup_impulse: np.ndarray
    sup_active: np.ndarray
    inf_value: np.ndarray
    inf_impulse: np.ndarray
    inf_active: np.ndarray
    branch: np.ndarray


@dataclass(frozen=True)
class SolveResult:
    """Full backward solve: the value field plus per-level branch provenance.

    ``values[n]`` is the row at backward level n (``values[0]`` = terminal
    data, ``values[N]`` = time 0).  The obstacle rows and chosen impulses
    recorded at level n were evaluated on ``values[n-1]``; row 0 of those
    arrays is NaN (no step solved there).
    """

    values: np.ndarray
    reports: tuple[SchemeStepReport, ...]
    branch: np.ndarray
    continuation: np.ndarray
    sup_value: np.ndarray
    sup_impulse: np.ndarray
    inf_value: np.ndarray
    inf_impulse: np.ndarray

    @property
    def value_at_start(self) -> np.ndarray:
        """Row at physical time 0 (backward level N)."""
        return self.values[-1]


def omicron_row(n: int, v_n: np.ndarray, problem: GameProblem, grids: Grids) -> np.ndarray:
    """Half-step diffusion correction (h/2) sigma_n^2 (D2 v_n) on one row."""
    h = grids.temporal.h
    t = float(grids.temporal.nodes[n])
    sigma = evaluate_coefficient(problem.volatility, t, grids.spatial.nodes)
    return 0.5 * h * sigma**2 * second_difference(v_n, grids.spatial)


def omicron(n: int, i: int, v_n: np.ndarray, problem: GameProblem, grids: Grids) -> float:
    """Correction added to the obstacle branches at one node so the timestep
    reduces to a single tridiagonal solve."""
    return float(omicron_row(n, v_n, problem, grids)[i])


def assemble_matrix(n: int, problem: GameProblem, grids: Grids) -> TridiagonalOperator:
    """Timestep operator at backward level n (identity rows at the boundary)."""
    h = grids.temporal.h
    t = float(grids.temporal.nodes[n])
    spatial = grids.spatial
    sigma = evaluate_coefficient(problem.volatility, t, spatial.nodes)
    ratio = h * sigma**2 / spatial.dx**2
    main = np.ones(spatial.intervals + 1)
    sub = np.zeros(spatial.intervals + 1)
    sup = np.zeros(spatial.intervals + 1)
    main[1:-1] += ratio[1:-1]
    sub[1:-1] = -0.5 * ratio[1:-1]
    sup[1:-1] = -0.5 * ratio[1:-1]
    return TridiagonalOperator(sub=sub, main=main, sup=sup)


def _tables(problem: GameProblem, grids: Grids) -> tuple[ImpulseTable, ImpulseTable]:
    sets_max, sets_min = problem.impulse_sets(grids.spatial)
    return ImpulseTable(sets_max, grids.spatial), ImpulseTable(sets_min, grids.spatial)


def assemble_rhs(
    n: int,
    v_prev: np.ndarray,
    problem: GameProblem,
    grids: Grids,
    tables: "tuple[ImpulseTable, ImpulseTable] | None" = None,
) -> RhsAssembly:
    """Double-obstacle right-hand side at level n evaluated on v_prev.

    Selection per node: continuation = disc * interp(v_prev, x_i + h b_i)
    + h f_i, then y_i = min(max(continuation_i, sup_i), inf_i).  Branch
    provenance uses strict comparisons, so ties resolve to continuation.
    The semi-Lagrangian foot point is clamped into the domain by the
    interpolation itself.
    """
    if tables is None:
        tables = _tables(problem, grids)
    table_max, table_min = tables
    h = grids.temporal.h
    t = float(grids.temporal.nodes[n])
    nodes = grids.spatial.nodes
    disc = problem.step_discount(h)

    foot = nodes + h * evaluate_coefficient(problem.drift, t, nodes)
    continuation = disc * interpolate(v_prev, grids.spatial, foot) + h * evaluate_coefficient(
        problem.running_reward, t, nodes
    )
    sup_value, sup_impulse, sup_active = table_max.sup_row(v_prev, t, problem.maximizer_cost, disc)
    inf_value, inf_impulse, inf_active = table_min.inf_row(v_prev, t, problem.minimizer_cost, disc)

    inner = np.maximum(continuation, sup_value)
    y = np.minimum(inner, inf_value)
    branch = np.zeros(nodes.size, dtype=np.int8)
    branch[sup_value > continuation] = MAXIMIZER
    branch[inf_value < inner] = MINIMIZER
    return RhsAssembly(
        y=y,
        continuation=continuation,
        sup_value=sup_value,
        sup_impulse=sup_impulse,
        sup_active=sup_active,
        inf_value=inf_value,
        inf_impulse=inf_impulse,
        inf_active=inf_active,
        branch=branch,
    )


def solve_tridiagonal(operator: TridiagonalOperator, y: np.ndarray) -> np.ndarray:
    """Direct forward-elimination / back-substitution on the three diagonals.

    No pivoting: assembly guarantees strict diagonal dominance.  A pivot
    magnitude below 1e-14 signals a corrupted operator and raises
    ``SolverError``.
    """
    n = operator.size
    if y.size != n:
        raise ValueError(f"rhs length {y.size} does not match operator size {n}")
    sub, main, sup = operator.sub, operator.main, operator.sup
    scratch = np.empty(n)
    out = np.empty(n)
    pivot = main[0]
    if abs(pivot) < _PIVOT_FLOOR:
        raise SolverError(f"degenerate pivot {pivot!r} in row 0")
    scratch[0] = sup[0] / pivot
    out[0] = y[0] / pivot
    for i in range(1, n):
        pivot = main[i] - sub[i] * scratch[i - 1]
        if abs(pivot) < _PIVOT_FLOOR:
            raise SolverError(f"degenerate pivot {pivot!r} in row {i}")
        scratch[i] = sup[i] / pivot
        out[i] = (y[i] - sub[i] * out[i - 1]) / pivot
    for i in range(n - 2, -1, -1):
        out[i] -= scratch[i] * out[i + 1]
    return out


def _advance(
    v_prev: np.ndarray,
    n: int,
    problem: GameProblem,
    grids: Grids,
    tables: "tuple[ImpulseTable, ImpulseTable] | None",
) -> tuple[np.ndarray, SchemeStepReport, RhsAssembly]:
    rhs = assemble_rhs(n, v_prev, problem, grids, tables)
    operator = assemble_matrix(n, problem, grids)
    row = solve_tridiagonal(operator, rhs.y)
    solve_residual = float(np.max(np.abs(operator.matvec(row) - rhs.y)))
    report = SchemeStepReport(
        time_index=n,
        continuation_nodes=int(np.count_nonzero(rhs.branch == CONTINUATION)),
        maximizer_nodes=int(np.count_nonzero(rhs.branch == MAXIMIZER)),
        minimizer_nodes=int(np.count_nonzero(rhs.branch == MINIMIZER)),
        solve_residual=solve_residual,
    )
    return row, report, rhs


def step(
    v_prev: np.ndarray,
    n: int,
    problem: GameProblem,
    grids: Grids,
    tables: "tuple[ImpulseTable, ImpulseTable] | None" = None,
) -> tuple[np.ndarray, SchemeStepReport]:
    """One backward timestep: V^n = A^{-1} y(V^{n-1})."""
    if n < 1:
        raise ValueError(f"time index must be >= 1, got {n}")
    row, report, _ = _advance(v_prev, n, problem, grids, tables)
    return row, report


def solve(problem: GameProblem, grids: Grids) -> SolveResult:
    """Full backward recursion from V^0 = g to the time-0 row V^N."""
    n_levels = grids.temporal.steps
    n_nodes = grids.spatial.intervals + 1
    tables = _tables(problem, grids)

    values = np.empty((n_levels + 1, n_nodes))
    values[0] = evaluate_terminal(problem.terminal_reward, grids.spatial.nodes)
    branch = np.zeros((n_levels + 1, n_nodes), dtype=np.int8)
    continuation = np.full((n_levels + 1, n_nodes), np.nan)
    sup_value = np.full((n_levels + 1, n_nodes), np.nan)
    sup_impulse = np.full((n_levels + 1, n_nodes), np.nan)
    inf_value = np.full((n_levels + 1, n_nodes), np.nan)
    inf_impulse = np.full((n_levels + 1, n_nodes), np.nan)

    reports = []
    for n in range(1, n_levels + 1):
        row, report, rhs = _advance(values[n - 1], n, problem, grids, tables)
        values[n] = row
        branch[n] = rhs.branch
        continuation[n] = rhs.continuation
        sup_value[n] = rhs.sup_value
        sup_impulse[n] = rhs.sup_impulse
        inf_value[n] = rhs.inf_value
        inf_impulse[n] = rhs.inf_impulse
        reports.append(report)
    return SolveResult(
        values=values,
        reports=tuple(reports),
        branch=branch,
        continuation=continuation,
        sup_value=sup_value,
        sup_impulse=sup_impulse,
        inf_value=inf_value,
        inf_impulse=inf_impulse,
    )


def residual(values: np.ndarray, problem: GameProblem, grids: Grids) -> np.ndarray:
    """Per-level sup norm of the discrete double-obstacle equation on a field.

    Evaluates, at every node of every level n >= 1,

        max( min( V^n - continuation - o, V^n - sup-obstacle - o ),
             V^n - inf-obstacle - o ),

    with o the half-step diffusion correction of level n, and returns the
    max absolute value per level.  Fields produced by ``solve`` annihilate
    this expression up to the linear-solve tolerance.
    """
    n_levels = values.shape[0] - 1
    tables = _tables(problem, grids)
    out = np.empty(n_levels)
    for n in range(1, n_levels + 1):
        rhs = assemble_rhs(n, values[n - 1], problem, grids, tables)
        w = values[n] - omicron_row(n, values[n], problem, grids)
        expr = np.maximum(np.minimum(w - rhs.continuation, w - rhs.sup_value), w - rhs.inf_value)
        out[n - 1] = float(np.max(np.abs(expr)))
    return out
