"""Numerical certificates for the structural properties the solver relies on.

Nothing here is a proof; each certificate evaluates a finitely checkable
statement at explicit tolerances and reports margins:

* matrix classes of the timestep operator (diagonal dominance, weakly
  chained dominance via graph reachability to a strictly dominant row,
  Z-sign pattern, entrywise-nonnegative dense inverse on small grids),
* entrywise monotonicity of the timestep on randomized ordered row pairs,
* the sup-norm stability bound T*max|f| + max|g| on the solved field,
* the solved field's obstacle ordering and double-obstacle residual,
* joint (h, dx) refinement gaps as the working stand-in for convergence,
* the Hausdorff gap between a finite impulse set and its continuum interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import CheckResult, GameProblem, Grids, evaluate_coefficient, evaluate_terminal
from .scheme import TridiagonalOperator, omicron_row, residual, solve, step

__all__ = [
    "MatrixClassification",
    "CertificateReport",
    "RefinementStudy",
    "classify_matrix",
    "certify_monotone_inverse",
    "certify_scheme",
    "refinement_study",
    "hausdorff_gap",
]


@dataclass(frozen=True)
class MatrixClassification:
    sdd: bool
    wdd: bool
    wcdd: bool
    z_matrix: bool
    nonnegative_diagonal: bool
    min_diagonal: float


@dataclass(frozen=True)
class CertificateReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def to_text(self) -> str:
        return "\n".join(c.line() for c in self.checks) + "\n"


def _as_dense(matrix: "TridiagonalOperator | np.ndarray") -> np.ndarray:
    if isinstance(matrix, TridiagonalOperator):
        return matrix.to_dense()
    dense = np.asarray(matrix, dtype=float)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {dense.shape}")
    return dense


def classify_matrix(matrix: "TridiagonalOperator | np.ndarray") -> MatrixClassification:
    """Row-scan and graph classification of a square matrix.

    Weakly chained dominance asks for weak dominance of every row plus, for
    each row, a walk through nonzero off-diagonal entries that ends in a
    strictly dominant row (a strictly dominant row qualifies with the empty
    walk).
    """
    dense = _as_dense(matrix)
    diag = np.diag(dense)
    off = dense - np.diag(diag)
    off_sums = np.sum(np.abs(off), axis=1)
    sdd_rows = np.abs(diag) > off_sums
    wdd_rows = np.abs(diag) >= off_sums

    wcdd = bool(np.all(wdd_rows))
    if wcdd:
        reaches = sdd_rows.copy()
        frontier = list(np.flatnonzero(reaches))
        incoming = [np.flatnonzero(off[:, j]) for j in range(dense.shape[0])]
        while frontier:
            j = frontier.pop()
            for i in incoming[j]:
                if not reaches[i]:
                    reaches[i] = True
                    frontier.append(int(i))
        wcdd = bool(np.all(reaches))

    return MatrixClassification(
        sdd=bool(np.all(sdd_rows)),
        wdd=bool(np.all(wdd_rows)),
        wcdd=wcdd,
        z_matrix=bool(np.all(off <= 0.0)),
        nonnegative_diagonal=bool(np.all(diag >= 0.0)),
        min_diagonal=float(np.min(diag)),
    )


def certify_monotone_inverse(matrix: "TridiagonalOperator | np.ndarray", size_limit: int = 200) -> CheckResult:
    """Dense-inversion certificate that A^{-1} >= 0 entrywise (M-matrix test)."""
    dense = _as_dense(matrix)
    if dense.shape[0] > size_limit:
        raise ValueError(f"dense inversion limited to size {size_limit}, got {dense.shape[0]}")
    try:
        inverse = np.linalg.inv(dense)
    except np.linalg.LinAlgError:
        return CheckResult("monotone inverse", False, detail="matrix is singular")
    min_entry = float(np.min(inverse))
    return CheckResult(
        "monotone inverse",
        bool(min_entry >= -1e-12),
        measured=min_entry,
        tolerance=-1e-12,
        detail="min entry of the dense inverse",
    )


def _monotonicity_trials(problem: GameProblem, grids: Grids, trials: int, rng: np.random.Generator) -> CheckResult:
    n_nodes = grids.spatial.intervals + 1
    n_levels = grids.temporal.steps
    worst = np.inf
    for trial in range(trials):
        n = 1 + trial % n_levels
        base = rng.uniform(-10.0, 10.0, n_nodes)
        bump = rng.uniform(0.0, 1.0, n_nodes)
        peak = float(np.max(bump))
        if peak > 0.0:
            bump = bump / peak
        low, _ = step(base, n, problem, grids)
        high, _ = step(base + bump, n, problem, grids)
        worst = min(worst, float(np.min(high - low)))
    return CheckResult(
        "timestep preserves entrywise order",
        bool(worst >= -1e-10),
        measured=worst,
        tolerance=-1e-10,
        detail=f"min entry of step(V+bump) - step(V) over {trials} randomized ordered pairs",
    )


def _field_norms(problem: GameProblem, grids: Grids) -> tuple[float, float]:
    f_max = 0.0
    for t in grids.temporal.nodes:
        f_row = evaluate_coefficient(problem.running_reward, float(t), grids.spatial.nodes)
        f_max = max(f_max, float(np.max(np.abs(f_row))))
    g_max = float(np.max(np.abs(evaluate_terminal(problem.terminal_reward, grids.spatial.nodes))))
    return f_max, g_max


def certify_scheme(problem: GameProblem, grids: Grids, trials: int = 100, seed: int = 0) -> CertificateReport:
    """Monotonicity, stability, obstacle-ordering, and residual certificates.

    Failures are report entries, never exceptions.  The certified statements
    hold by construction of the timestep, so a failure indicates an
    implementation bug rather than an unlucky draw.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    checks = [_monotonicity_trials(problem, grids, trials, rng)]

    result = solve(problem, grids)
    f_max, g_max = _field_norms(problem, grids)
    bound = grids.temporal.horizon * f_max + g_max
    peak = float(np.max(np.abs(result.values)))
    checks.append(
        CheckResult(
            "sup-norm stability bound",
            bool(peak <= bound + 1e-8),
            measured=peak,
            tolerance=bound + 1e-8,
            detail="max |V| vs T*max|f| + max|g| on the grid",
        )
    )

    worst_order = -np.inf
    for n in range(1, grids.temporal.steps + 1):
        o = omicron_row(n, result.values[n], problem, grids)
        worst_order = max(worst_order, float(np.max(result.values[n] - result.inf_value[n] - o)))
    checks.append(
        CheckResult(
            "obstacle ordering V <= inf-obstacle + correction",
            bool(worst_order <= 1e-9),
            measured=worst_order,
            tolerance=1e-9,
            detail="max violation over all nodes and levels",
        )
    )

    res = residual(result.values, problem, grids)
    checks.append(
        CheckResult(
            "double-obstacle residual annihilation",
            bool(float(np.max(res)) <= 1e-9),
            measured=float(np.max(res)),
            tolerance=1e-9,
            detail="max per-level residual of the solved field",
        )
    )
    return CertificateReport(tuple(checks))


@dataclass(frozen=True)
class RefinementStudy:
    """Successive sup-norm gaps between jointly refined solves.

    Row ``level`` compares the solve at refinement factor 2^level with the
    one at 2^(level+1), sampled on the coarser grid's shared nodes.
    """

    step_sizes: np.ndarray
    gaps: np.ndarray

    def rows(self) -> tuple[tuple[int, float, float], ...]:
        return tuple((lvl, float(h), float(g)) for lvl, (h, g) in enumerate(zip(self.step_sizes, self.gaps)))

    @property
    def decreasing(self) -> bool:
        return bool(np.all(np.diff(self.gaps) < 0.0))


def refinement_study(problem: GameProblem, grids: Grids, levels: int = 3) -> RefinementStudy:
    """Solve at ``levels``+1 joint halvings of (h, dx) and report the gaps."""
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    fields = []
    hs = []
    for lvl in range(levels + 1):
        refined = grids.refined(2**lvl) if lvl else grids
        fields.append(solve(problem, refined).values)
        hs.append(refined.temporal.h)
    gaps = np.empty(levels)
    for lvl in range(levels):
        coarse = fields[lvl]
        fine = fields[lvl + 1][::2, ::2]
        gaps[lvl] = float(np.max(np.abs(coarse - fine)))
    return RefinementStudy(step_sizes=np.asarray(hs[:levels]), gaps=gaps)


def hausdorff_gap(impulse_set: np.ndarray, interval: tuple[float, float]) -> float:
    """Hausdorff distance between a finite impulse set and a closed interval.

    max of (the farthest any interval point is from the set) and (the
    farthest any set point is from the interval); the first maximum is
    attained at an interval endpoint or at a midpoint of consecutive set
    points, so the value is exact.
    """
    values = np.sort(np.asarray(impulse_set, dtype=float))
    if values.size == 0:
        raise ValueError("impulse set is empty")
    lo, hi = float(interval[0]), float(interval[1])
    if lo > hi:
        raise ValueError(f"interval bounds out of order: {interval}")

    candidates = [lo, hi]
    if values.size > 1:
        mids = 0.5 * (values[:-1] + values[1:])
        candidates.extend(np.clip(mids, lo, hi).tolist())
    to_set = max(float(np.min(np.abs(values - c))) for c in candidates)
    to_interval = float(np.max(np.maximum(np.maximum(lo - values, values - hi), 0.0)))
    return max(to_set, to_interval)
