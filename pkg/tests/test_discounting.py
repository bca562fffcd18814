"""The discounted pipeline: every continuation read from the previous level
carries exp(-rate*h), and the payoff oracle discounts by exp(-rate*t); the
residual, policy-iteration, ordering, and Monte Carlo identities must hold
for rate > 0 exactly as they do undiscounted."""

import numpy as np

from impulsegame import (
    ExchangeRateInstance,
    certify_scheme,
    howard_step,
    omicron_row,
    residual,
    simulate_payoff,
    solve,
    step,
)

from conftest import table_grids

RATE = 0.25


def discounted_setup():
    return ExchangeRateInstance(discount_rate=RATE).build(), table_grids()


def test_residual_annihilates():
    problem, grids = discounted_setup()
    result = solve(problem, grids)
    assert float(np.max(residual(result.values, problem, grids))) <= 1e-9


def test_howard_agreement_and_obstacle_ordering():
    problem, grids = discounted_setup()
    result = solve(problem, grids)
    for n in range(1, grids.temporal.steps + 1):
        direct, _ = step(result.values[n - 1], n, problem, grids)
        row, _, report = howard_step(n, result.values[n - 1], problem, grids)
        assert report.converged and report.iterations <= 2
        assert np.max(np.abs(row - direct)) <= 1e-10
        o = omicron_row(n, result.values[n], problem, grids)
        assert np.max(result.values[n] - result.inf_value[n] - o) <= 1e-9


def test_discounting_shrinks_the_field():
    flat_problem, grids = ExchangeRateInstance().build(), table_grids()
    discounted_problem, _ = discounted_setup()
    flat = solve(flat_problem, grids)
    discounted = solve(discounted_problem, grids)
    # rewards are nonpositive, so discounting can only pull values toward 0
    assert np.max(np.abs(discounted.values)) <= np.max(np.abs(flat.values))
    assert np.max(np.abs(discounted.values)) < np.max(np.abs(flat.values)) - 1e-3


def test_monte_carlo_consistency():
    problem, grids = discounted_setup()
    result = solve(problem, grids)
    estimate = simulate_payoff(problem, result, grids, 2.5, 20000, seed=7)
    value = float(result.value_at_start[50])
    assert abs(estimate.mean - value) <= 3.0 * estimate.standard_error + 0.05


def test_certificates_pass():
    problem, grids = discounted_setup()
    report = certify_scheme(problem, grids, trials=50, seed=2)
    assert report.passed, report.to_text()
