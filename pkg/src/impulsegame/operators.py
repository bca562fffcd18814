"""Grid-local numerical kernels.

Three building blocks used everywhere else:

* clamped monotone linear interpolation of a value row (no extrapolation:
  queries outside [x_0, x_M] return the boundary values),
* the centered second difference with homogeneous second-derivative
  boundary rows (exactly zero at i = 0 and i = M),
* the discrete intervention operators, which scan a node's finite impulse
  set for the best post-jump continuation net of cost and report which
  impulse attained it.

The intervention scan discounts the continuation read from the previous
backward level by a caller-supplied factor (exp(-rate*h); 1.0 when
undiscounted).  Ties are broken deterministically: smallest |impulse|
first, then ascending signed impulse.  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import CoefficientFn, GameProblem, SpatialGrid, evaluate_coefficient

__all__ = [
    "InterventionResult",
    "interpolate",
    "second_difference",
    "intervention_sup",
    "intervention_inf",
    "ImpulseTable",
]


@dataclass(frozen=True)
class InterventionResult:
    """Best obstacle value at one node, with the impulse that attained it.

    ``obstacle_active`` is False only for an empty impulse set, in which
    case ``value`` is the -inf (sup) or +inf (inf) sentinel that the
    min/max composition of the timestep ignores, and ``impulse`` is NaN.
    """

    value: float
    impulse: float
    obstacle_active: bool


def _locate(grid: SpatialGrid, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Interval index k with x in [x_k, x_{k+1}), weight alpha, and clamp masks."""
    nodes = grid.nodes
    k = np.searchsorted(nodes, x, side="right") - 1
    k = np.clip(k, 0, grid.intervals - 1)
    alpha = np.clip((x - nodes[k]) / grid.dx, 0.0, 1.0)
    below = x <= nodes[0]
    above = x >= nodes[-1]
    return k, alpha, below, above


def _blend(row: np.ndarray, k: np.ndarray, alpha: np.ndarray, below: np.ndarray, above: np.ndarray) -> np.ndarray:
    out = alpha * row[k + 1] + (1.0 - alpha) * row[k]
    out = np.where(below, row[0], out)
    out = np.where(above, row[-1], out)
    return out


def interpolate(row: np.ndarray, grid: SpatialGrid, x: "np.ndarray | float") -> "np.ndarray | float":
    """Clamped linear interpolation of a value row at x.

    Returns alpha*V_{k+1} + (1-alpha)*V_k for x in [x_0, x_M]; V_0 for
    x <= x_0 and V_M for x >= x_M (no extrapolation).  Exact at grid nodes
    and exactly monotone in the row: row <= row' entrywise implies
    interpolate(row, x) <= interpolate(row', x) for every x, because the
    convex blend multiplies by nonnegative weights only.
    """
    x_arr = np.asarray(x, dtype=float)
    out = _blend(row, *_locate(grid, x_arr))
    return out if np.ndim(x) else float(out)


def second_difference(row: np.ndarray, grid: SpatialGrid, i: "int | None" = None) -> "np.ndarray | float":
    """Centered second difference (V_{i+1} - 2 V_i + V_{i-1}) / dx^2.

    Exactly zero at the boundary nodes i = 0 and i = M.  With ``i`` given
    returns the single entry, otherwise the full row.
    """
    out = np.zeros(np.shape(row), dtype=float)
    out[1:-1] = (row[2:] - 2.0 * row[1:-1] + row[:-2]) / grid.dx**2
    if i is None:
        return out
    return float(out[i])


def _tie_order(impulses: np.ndarray) -> np.ndarray:
    """Scan order realizing the tie rule: smallest |z| first, then ascending z."""
    return np.lexsort((impulses, np.abs(impulses)))


def _scan(
    row_prev: np.ndarray,
    grid: SpatialGrid,
    impulses: np.ndarray,
    x_node: float,
    t: float,
    cost: CoefficientFn,
    discount: float,
    sign: float,
) -> InterventionResult:
    if impulses.size == 0:
        return InterventionResult(sign * np.inf, np.nan, False)
    order = _tie_order(impulses)
    z = impulses[order]
    values = discount * interpolate(row_prev, grid, x_node + z) + sign * evaluate_coefficient(cost, t, z)
    best = int(np.argmin(values)) if sign > 0 else int(np.argmax(values))
    return InterventionResult(float(values[best]), float(z[best]), True)


def intervention_sup(
    row_prev: np.ndarray,
    t: float,
    i: int,
    problem: GameProblem,
    grid: SpatialGrid,
    impulses: "np.ndarray | None" = None,
    discount: float = 1.0,
) -> InterventionResult:
    """Maximizer obstacle at node i: max over the node's impulse set of
    discount * interp(row_prev, x_i + z) - maximizer_cost(t, z).

    ``row_prev`` is the value row at the previous backward level; costs are
    evaluated at the current time node t.  ``impulses`` overrides the
    problem's generated set (used by callers that materialize sets once).
    """
    if impulses is None:
        impulses = problem.maximizer_impulses(grid)[i]
    return _scan(row_prev, grid, impulses, float(grid.nodes[i]), t, problem.maximizer_cost, discount, -1.0)


def intervention_inf(
    row_prev: np.ndarray,
    t: float,
    i: int,
    problem: GameProblem,
    grid: SpatialGrid,
    impulses: "np.ndarray | None" = None,
    discount: float = 1.0,
) -> InterventionResult:
    """Minimizer obstacle at node i: min over the node's impulse set of
    discount * interp(row_prev, x_i + z) + minimizer_cost(t, z).
    """
    if impulses is None:
        impulses = problem.minimizer_impulses(grid)[i]
    return _scan(row_prev, grid, impulses, float(grid.nodes[i]), t, problem.minimizer_cost, discount, 1.0)


class ImpulseTable:
    """Padded per-node impulse sets with precomputed interpolation stencils.

    Rows are stored in tie-break order so that a first-occurrence
    argmax/argmin along each row reproduces the scalar operators' chosen
    impulse bit for bit; the interpolation locations of all post-impulse
    points are fixed by the grid and cached at construction.
    """

    def __init__(self, sets: tuple[np.ndarray, ...], grid: SpatialGrid):
        self.grid = grid
        n_nodes = grid.intervals + 1
        width = max((s.size for s in sets), default=0)
        width = max(width, 1)
        impulses = np.zeros((n_nodes, width))
        valid = np.zeros((n_nodes, width), dtype=bool)
        for i, s in enumerate(sets):
            if s.size == 0:
                continue
            ordered = s[_tie_order(s)]
            impulses[i, : s.size] = ordered
            valid[i, : s.size] = True
        self.impulses = impulses
        self.valid = valid
        targets = grid.nodes[:, None] + impulses
        self._stencil = _locate(grid, targets)

    def sup_row(
        self, row_prev: np.ndarray, t: float, cost: CoefficientFn, discount: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized maximizer obstacle over all nodes: (values, impulses, active)."""
        return self._optimize(row_prev, t, cost, discount, sign=-1.0)

    def inf_row(
        self, row_prev: np.ndarray, t: float, cost: CoefficientFn, discount: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized minimizer obstacle over all nodes: (values, impulses, active)."""
        return self._optimize(row_prev, t, cost, discount, sign=1.0)

    def _optimize(
        self, row_prev: np.ndarray, t: float, cost: CoefficientFn, discount: float, sign: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        continuation = discount * _blend(row_prev, *self._stencil)
        values = continuation + sign * evaluate_coefficient(cost, t, self.impulses)
        values = np.where(self.valid, values, sign * np.inf)
        best = np.argmin(values, axis=1) if sign > 0 else np.argmax(values, axis=1)
        rows = np.arange(values.shape[0])
        active = self.valid.any(axis=1)
        value = np.where(active, values[rows, best], sign * np.inf)
        impulse = np.where(active, self.impulses[rows, best], np.nan)
        return value, impulse, active
