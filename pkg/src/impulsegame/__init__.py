"""Finite-horizon zero-sum stochastic impulse games on a 1-D state.

Solves the double-obstacle dynamic-programming equation of a two-player
impulse game backward in time with an explicit-obstacle semi-Lagrangian
timestep, extracts the equilibrium impulse strategies and optimal state
path, cross-checks the field with Howard policy iteration and a seeded
Monte Carlo payoff estimator, and certifies the structural properties the
construction relies on (matrix classes, monotonicity, stability, residual
annihilation, refinement behavior).
"""

__version__ = "0.1.0"

from .operators import ImpulseTable, InterventionResult, interpolate, intervention_inf, intervention_sup, second_difference
from .policy import HowardReport, PolicySnapshot, howard_step, policy_evaluation, policy_improvement, policy_rhs
from .problem import (
    CheckResult,
    ExchangeRateInstance,
    GameProblem,
    Grids,
    SpatialGrid,
    TemporalGrid,
    ValidationReport,
    build_impulse_sets,
    validate,
)
from .scheme import (
    RhsAssembly,
    SchemeStepReport,
    SolveResult,
    SolverError,
    TridiagonalOperator,
    assemble_matrix,
    assemble_rhs,
    omicron,
    omicron_row,
    residual,
    solve,
    solve_tridiagonal,
    step,
)
from .strategy import MonteCarloEstimate, StrategyRecord, extract_strategy, simulate_payoff
from .verify import (
    CertificateReport,
    MatrixClassification,
    RefinementStudy,
    certify_monotone_inverse,
    certify_scheme,
    classify_matrix,
    hausdorff_gap,
    refinement_study,
)

__all__ = [
    "__version__",
    "TemporalGrid",
    "SpatialGrid",
    "Grids",
    "GameProblem",
    "ExchangeRateInstance",
    "build_impulse_sets",
    "validate",
    "ValidationReport",
    "CheckResult",
    "InterventionResult",
    "ImpulseTable",
    "interpolate",
    "second_difference",
    "intervention_sup",
    "intervention_inf",
    "TridiagonalOperator",
    "SchemeStepReport",
    "RhsAssembly",
    "SolveResult",
    "SolverError",
    "omicron",
    "omicron_row",
    "assemble_matrix",
    "assemble_rhs",
    "solve_tridiagonal",
    "step",
    "solve",
    "residual",
    "PolicySnapshot",
    "HowardReport",
    "policy_rhs",
    "policy_evaluation",
    "policy_improvement",
    "howard_step",
    "StrategyRecord",
    "MonteCarloEstimate",
    "extract_strategy",
    "simulate_payoff",
    "MatrixClassification",
    "CertificateReport",
    "RefinementStudy",
    "classify_matrix",
    "certify_monotone_inverse",
    "certify_scheme",
    "refinement_study",
    "hausdorff_gap",
]
