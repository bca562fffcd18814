"""Game instances for two-player zero-sum impulse control on a 1-D state.

A problem bundles the uncontrolled dynamics dX = b(t,X) dt + sigma(t,X) dW,
the running reward f(t,x), the terminal reward g(x), the two intervention
cost functions c(t, xi) (maximizer) and chi(t, eta) (minimizer), a discount
rate, and the per-node finite impulse sets from which each player may pick
a jump.  Both players' impulse sets are generated from the spatial grid so
that every admissible jump lands back inside the computational domain.

Coefficient and cost callables must be pure and numpy-vectorized: they are
evaluated on whole grid rows at once and problems are shared across
concurrent workers without locking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "TemporalGrid",
    "SpatialGrid",
    "Grids",
    "GameProblem",
    "ExchangeRateInstance",
    "build_impulse_sets",
    "validate",
    "CheckResult",
    "ValidationReport",
    "evaluate_coefficient",
]

CoefficientFn = Callable[[float, np.ndarray], "np.ndarray | float"]
TerminalFn = Callable[[np.ndarray], "np.ndarray | float"]
ImpulseSetGenerator = Callable[["SpatialGrid"], "tuple[np.ndarray, ...]"]


@dataclass(frozen=True)
class TemporalGrid:
    """Uniform backward time grid tau_n = T - n*h, n = 0..N (tau_0 = T, tau_N = 0)."""

    horizon: float
    steps: int

    def __post_init__(self) -> None:
        if self.horizon <= 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")

    @property
    def h(self) -> float:
        return self.horizon / self.steps

    @cached_property
    def nodes(self) -> np.ndarray:
        # linspace pins both endpoints exactly: tau_0 = T, tau_N = 0.
        return np.linspace(self.horizon, 0.0, self.steps + 1)


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform spatial grid x_i = x_min + i*dx, i = 0..M."""

    x_min: float
    x_max: float
    intervals: int

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise ValueError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.intervals < 2:
            raise ValueError(f"intervals must be >= 2, got {self.intervals}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.intervals

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.intervals + 1)

    def nearest_index(self, x: "np.ndarray | float") -> "np.ndarray | int":
        """Index of the grid node closest to x (clipped into the grid)."""
        idx = np.rint((np.asarray(x, dtype=float) - self.x_min) / self.dx).astype(int)
        idx = np.clip(idx, 0, self.intervals)
        return idx if np.ndim(x) else int(idx)


@dataclass(frozen=True)
class Grids:
    """Paired temporal and spatial discretization of one run."""

    temporal: TemporalGrid
    spatial: SpatialGrid

    def refined(self, factor: int = 2) -> "Grids":
        """Jointly refined grids: h and dx both divided by ``factor``."""
        return Grids(
            TemporalGrid(self.temporal.horizon, self.temporal.steps * factor),
            SpatialGrid(self.spatial.x_min, self.spatial.x_max, self.spatial.intervals * factor),
        )


def build_impulse_sets(spatial_grid: SpatialGrid, stride: int = 1) -> tuple[np.ndarray, ...]:
    """Per-node impulse sets of nonzero multiples of stride*dx staying in the grid.

    Node i receives { j*stride*dx : j integer, j != 0,
    x_min <= x_i + j*stride*dx <= x_max }.  Every admissible jump lands
    exactly on a grid node, and the Hausdorff distance between the set and
    the continuum interval [x_min - x_i, x_max - x_i] is at most stride*dx
    for stride 1 and (2*stride - 1)*dx in general (nodes with
    0 < i mod stride lose the one-step inward jump near a boundary).

    Requires M >= 2*stride so that every node keeps a nonempty set.
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    m = spatial_grid.intervals
    if m < 2 * stride:
        raise ValueError(f"need intervals >= 2*stride, got M={m}, stride={stride}")
    step = stride * spatial_grid.dx
    sets = []
    for i in range(m + 1):
        lo = -(i // stride)
        hi = (m - i) // stride
        j = np.concatenate((np.arange(lo, 0), np.arange(1, hi + 1)))
        sets.append(j * step)
    return tuple(sets)


def _default_impulse_generator(stride: int) -> ImpulseSetGenerator:
    def generator(grid: SpatialGrid) -> tuple[np.ndarray, ...]:
        return build_impulse_sets(grid, stride)

    return generator


@dataclass(frozen=True)
class GameProblem:
    """Coefficients, rewards, costs, and impulse-set generators of one game.

    ``cost_floor`` is the declared k > 0 with inf c >= k and inf chi >= k;
    ``discount_rate`` is the rate applied as exp(-rate*h) to every
    continuation value read from the previous backward level (0 disables
    discounting and reproduces the undiscounted timestep equations exactly).
    """

    drift: CoefficientFn
    volatility: CoefficientFn
    running_reward: CoefficientFn
    terminal_reward: TerminalFn
    maximizer_cost: CoefficientFn
    minimizer_cost: CoefficientFn
    cost_floor: float
    discount_rate: float = 0.0
    maximizer_impulses: ImpulseSetGenerator = field(default=_default_impulse_generator(1))
    minimizer_impulses: ImpulseSetGenerator = field(default=_default_impulse_generator(1))

    def __post_init__(self) -> None:
        if self.discount_rate < 0.0:
            raise ValueError(f"discount_rate must be >= 0, got {self.discount_rate}")

    def impulse_sets(self, grid: SpatialGrid) -> tuple[tuple[np.ndarray, ...], tuple[np.ndarray, ...]]:
        """Materialized (maximizer, minimizer) impulse sets for a spatial grid."""
        return self.maximizer_impulses(grid), self.minimizer_impulses(grid)

    def step_discount(self, h: float) -> float:
        """One-step continuation discount exp(-discount_rate * h)."""
        return float(np.exp(-self.discount_rate * h))


@dataclass(frozen=True)
class ExchangeRateInstance:
    """Built-in exchange-rate intervention game.

    A commercial institution (maximizer) and a central bank (minimizer) both
    shift the rate by discrete amounts.  Uncontrolled dynamics are mean-fleeing
    geometric: b(t,x) = -drift_speed*x, sigma(t,x) = volatility*x.  The running
    reward is -(x - target_rate)^2, the terminal reward is zero, and each
    intervention of size z costs proportional*|z| + fixed.
    """

    drift_speed: float = 0.25
    volatility: float = 0.30
    target_rate: float = 1.0
    proportional_cost_max: float = 1.0
    proportional_cost_min: float = 1.0
    fixed_cost_max: float = 0.1
    fixed_cost_min: float = 0.1
    discount_rate: float = 0.0
    x_start: float = 2.5

    def build(self, impulse_stride: int = 1) -> GameProblem:
        mu = self.drift_speed
        vol = self.volatility
        target = self.target_rate
        lam_max, k_max = self.proportional_cost_max, self.fixed_cost_max
        lam_min, k_min = self.proportional_cost_min, self.fixed_cost_min
        generator = _default_impulse_generator(impulse_stride)
        return GameProblem(
            drift=lambda t, x: -mu * x,
            volatility=lambda t, x: vol * x,
            running_reward=lambda t, x: -((x - target) ** 2),
            terminal_reward=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            maximizer_cost=lambda t, z: lam_max * np.abs(z) + k_max,
            minimizer_cost=lambda t, z: lam_min * np.abs(z) + k_min,
            cost_floor=min(k_max, k_min),
            discount_rate=self.discount_rate,
            maximizer_impulses=generator,
            minimizer_impulses=generator,
        )


def evaluate_coefficient(fn: CoefficientFn, t: float, x: np.ndarray) -> np.ndarray:
    """Evaluate a coefficient on a grid row, broadcasting scalar returns."""
    out = np.asarray(fn(t, x), dtype=float)
    if out.shape != np.shape(x):
        out = np.broadcast_to(out, np.shape(x)).copy()
    return out


def evaluate_terminal(fn: TerminalFn, x: np.ndarray) -> np.ndarray:
    out = np.asarray(fn(x), dtype=float)
    if out.shape != np.shape(x):
        out = np.broadcast_to(out, np.shape(x)).copy()
    return out


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named validation or certification check."""

    name: str
    passed: bool
    measured: float | None = None
    tolerance: float | None = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = [f"[{status}] {self.name}"]
        if self.measured is not None:
            parts.append(f"measured={self.measured!r}")
        if self.tolerance is not None:
            parts.append(f"tolerance={self.tolerance!r}")
        if self.detail:
            parts.append(self.detail)
        return "  ".join(parts)


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def to_text(self) -> str:
        return "\n".join(c.line() for c in self.checks) + "\n"


_PAIR_SAMPLE_CAP = 512


def _union_impulses(sets: tuple[np.ndarray, ...]) -> np.ndarray:
    values = np.unique(np.concatenate([s for s in sets if s.size] or [np.empty(0)]))
    if values.size > _PAIR_SAMPLE_CAP:
        # Even subsample keeps the extreme and near-zero impulses represented.
        pick = np.linspace(0, values.size - 1, _PAIR_SAMPLE_CAP).round().astype(int)
        values = values[np.unique(pick)]
    return values


def _check_cost_floor(
    problem: GameProblem, times: np.ndarray, union_max: np.ndarray, union_min: np.ndarray
) -> CheckResult:
    floor = problem.cost_floor
    if not floor > 0.0:
        return CheckResult("cost floor positive", False, measured=floor, detail="declared floor k must be > 0")
    worst = np.inf
    for t in times:
        if union_max.size:
            worst = min(worst, float(np.min(evaluate_coefficient(problem.maximizer_cost, float(t), union_max))))
        if union_min.size:
            worst = min(worst, float(np.min(evaluate_coefficient(problem.minimizer_cost, float(t), union_min))))
    slack = 1e-12 * max(1.0, floor)
    return CheckResult(
        "cost floor positive",
        bool(worst >= floor - slack),
        measured=worst,
        tolerance=floor,
        detail="min cost over all (time node, impulse) pairs vs declared floor",
    )


def _check_subadditive(name: str, cost: CoefficientFn, times: np.ndarray, union: np.ndarray) -> CheckResult:
    if union.size == 0:
        return CheckResult(name, True, detail="no impulses to test")
    a, b = np.meshgrid(union, union, indexing="ij")
    worst = -np.inf
    for t in times:
        combined = evaluate_coefficient(cost, float(t), a + b)
        split = evaluate_coefficient(cost, float(t), a) + evaluate_coefficient(cost, float(t), b)
        worst = max(worst, float(np.max(combined - split)))
    return CheckResult(
        name,
        bool(worst <= 1e-12),
        measured=worst,
        tolerance=1e-12,
        detail="max of cost(t, z1+z2) - cost(t, z1) - cost(t, z2) over impulse pairs",
    )


def _check_in_grid(
    grid: SpatialGrid, sets_max: tuple[np.ndarray, ...], sets_min: tuple[np.ndarray, ...]
) -> CheckResult:
    tol = 1e-9 * grid.dx
    worst = 0.0
    empty = 0
    for i, x in enumerate(grid.nodes):
        for sets in (sets_max, sets_min):
            z = sets[i]
            if z.size == 0:
                empty += 1
                continue
            target = x + z
            worst = max(worst, float(np.max(grid.x_min - target)), float(np.max(target - grid.x_max)))
    detail = "max overshoot of post-impulse points beyond the domain"
    if empty:
        detail += f"; {empty} empty node sets"
    return CheckResult("impulse sets stay in grid", bool(worst <= tol), measured=worst, tolerance=tol, detail=detail)


def _check_terminal(
    problem: GameProblem,
    horizon: float,
    grid: SpatialGrid,
    sets_max: tuple[np.ndarray, ...],
    sets_min: tuple[np.ndarray, ...],
) -> CheckResult:
    g = evaluate_terminal(problem.terminal_reward, grid.nodes)
    scale = 1.0 + float(np.max(np.abs(g))) if g.size else 1.0
    tol = 1e-12 * scale
    worst = -np.inf
    for i, x in enumerate(grid.nodes):
        zs = sets_max[i]
        if zs.size:
            best_gain = np.max(
                evaluate_terminal(problem.terminal_reward, x + zs)
                - evaluate_coefficient(problem.maximizer_cost, horizon, zs)
            )
            worst = max(worst, float(best_gain - g[i]))
        zm = sets_min[i]
        if zm.size:
            best_block = np.min(
                evaluate_terminal(problem.terminal_reward, x + zm)
                + evaluate_coefficient(problem.minimizer_cost, horizon, zm)
            )
            worst = max(worst, float(g[i] - best_block))
    return CheckResult(
        "terminal compatibility",
        bool(worst <= tol),
        measured=worst,
        tolerance=tol,
        detail="no terminal impulse may improve either player's position at T",
    )


def validate(problem: GameProblem, temporal: TemporalGrid, spatial: SpatialGrid) -> ValidationReport:
    """Check the testable standing assumptions on a problem instance.

    Pure and non-aborting: failures come back as report entries.  Covers the
    positive cost floor over all (time node, impulse) pairs, plain cost
    subadditivity over sampled impulse pairs, the in-grid property of every
    impulse set, and terminal compatibility (no terminal impulse improves
    either player's position).  The strict subadditivity variant with a
    positive margin function is recorded as not machine-checked.
    """
    sets_max, sets_min = problem.impulse_sets(spatial)
    union_max = _union_impulses(sets_max)
    union_min = _union_impulses(sets_min)
    times = temporal.nodes
    checks = (
        _check_cost_floor(problem, times, union_max, union_min),
        _check_subadditive("maximizer cost subadditive", problem.maximizer_cost, times, union_max),
        _check_subadditive("minimizer cost subadditive", problem.minimizer_cost, times, union_min),
        _check_in_grid(spatial, sets_max, sets_min),
        _check_terminal(problem, temporal.horizon, spatial, sets_max, sets_min),
        CheckResult(
            "strict subadditivity margin",
            True,
            detail="informational: margin-strict variant not machine-checked",
        ),
    )
    return ValidationReport(checks)
