import numpy as np
import pytest

from impulsegame import (
    ExchangeRateInstance,
    GameProblem,
    SpatialGrid,
    TemporalGrid,
    build_impulse_sets,
    validate,
)
from impulsegame.problem import evaluate_coefficient

from conftest import table_grids


class TestTemporalGrid:
    def test_endpoints_exact(self):
        grid = TemporalGrid(1.0, 20)
        assert grid.nodes[0] == 1.0
        assert grid.nodes[-1] == 0.0
        assert grid.nodes.size == 21

    def test_step_consistency(self):
        grid = TemporalGrid(0.7, 13)
        assert abs(grid.steps * grid.h - grid.horizon) <= np.finfo(float).eps * grid.horizon

    @pytest.mark.parametrize("horizon,steps", [(0.0, 5), (-1.0, 5), (1.0, 0)])
    def test_rejects_bad_arguments(self, horizon, steps):
        with pytest.raises(ValueError):
            TemporalGrid(horizon, steps)


class TestSpatialGrid:
    def test_uniform_increasing(self):
        grid = SpatialGrid(0.0, 5.0, 100)
        diffs = np.diff(grid.nodes)
        assert np.all(diffs > 0)
        assert np.allclose(diffs, grid.dx, rtol=0, atol=1e-14)
        assert grid.nodes[0] == 0.0 and grid.nodes[-1] == 5.0

    def test_rejects_tiny_or_inverted(self):
        with pytest.raises(ValueError):
            SpatialGrid(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            SpatialGrid(1.0, 0.0, 10)

    def test_nearest_index(self):
        grid = SpatialGrid(0.0, 2.0, 4)
        assert grid.nearest_index(0.74) == 1
        assert grid.nearest_index(-3.0) == 0
        assert grid.nearest_index(9.0) == 4
        np.testing.assert_array_equal(grid.nearest_index(np.array([0.0, 1.01, 2.0])), [0, 2, 4])


class TestBuildImpulseSets:
    def test_interior_node_small_grid(self):
        grid = SpatialGrid(0.0, 2.0, 2)
        sets = build_impulse_sets(grid, stride=1)
        assert sorted(sets[1].tolist()) == [-1.0, 1.0]

    def test_boundary_node_only_inward(self):
        grid = SpatialGrid(0.0, 2.0, 2)
        sets = build_impulse_sets(grid, stride=1)
        assert sorted(sets[0].tolist()) == [1.0, 2.0]
        assert sorted(sets[2].tolist()) == [-2.0, -1.0]

    def test_midpoint_count_and_hausdorff(self):
        # Independent oracle: brute-force max-min distance on a fine sampling
        # of the continuum interval, plus overshoot of the set beyond it.
        grid = SpatialGrid(0.0, 5.0, 100)
        sets = build_impulse_sets(grid, stride=1)
        z = np.sort(sets[50])
        assert z.size == 100
        probes = np.linspace(-2.5, 2.5, 200001)
        to_set = np.max(np.min(np.abs(probes[:, None] - z[None, :]), axis=1))
        to_interval = np.max(np.maximum(np.maximum(-2.5 - z, z - 2.5), 0.0))
        assert abs(max(to_set, to_interval) - 0.05) <= 1e-12

    def test_zero_excluded_and_on_grid(self):
        grid = SpatialGrid(-1.0, 3.0, 16)
        sets = build_impulse_sets(grid, stride=2)
        for i, z in enumerate(sets):
            assert np.all(z != 0.0)
            targets = grid.nodes[i] + z
            snapped = grid.nodes[np.rint((targets - grid.x_min) / grid.dx).astype(int)]
            assert np.max(np.abs(targets - snapped)) <= 1e-12

    @pytest.mark.parametrize("stride,factor", [(1, 1), (2, 3), (3, 5)])
    def test_hausdorff_bound_every_node(self, stride, factor):
        # stride*dx for stride 1; (2*stride - 1)*dx in general, attained at
        # nodes with 0 < i mod stride near a boundary.
        grid = SpatialGrid(0.0, 5.0, 40)
        sets = build_impulse_sets(grid, stride)
        for i, z in enumerate(sets):
            lo, hi = grid.x_min - grid.nodes[i], grid.x_max - grid.nodes[i]
            probes = np.linspace(lo, hi, 4001)
            gap = np.max(np.min(np.abs(probes[:, None] - z[None, :]), axis=1))
            assert gap <= factor * grid.dx + 1e-12

    def test_rejects_too_coarse(self):
        with pytest.raises(ValueError):
            build_impulse_sets(SpatialGrid(0.0, 1.0, 3), stride=2)
        with pytest.raises(ValueError):
            build_impulse_sets(SpatialGrid(0.0, 1.0, 4), stride=0)


class TestValidate:
    def test_exchange_table_parameters_pass(self, exchange):
        problem, grids = exchange
        report = validate(problem, grids.temporal, grids.spatial)
        assert report.passed, report.to_text()

    def test_validate_is_pure(self, exchange):
        problem, grids = exchange
        first = validate(problem, grids.temporal, grids.spatial)
        second = validate(problem, grids.temporal, grids.spatial)
        assert first == second

    def test_zero_cost_floor_fails(self):
        grids = table_grids()
        instance = ExchangeRateInstance(proportional_cost_max=0.0, fixed_cost_max=0.0)
        problem = instance.build()
        report = validate(problem, grids.temporal, grids.spatial)
        names = {c.name for c in report.failures}
        assert "cost floor positive" in names

    def test_floor_below_declared_fails(self):
        grids = table_grids()
        problem = GameProblem(
            drift=lambda t, x: np.zeros_like(x),
            volatility=lambda t, x: np.zeros_like(x),
            running_reward=lambda t, x: np.zeros_like(x),
            terminal_reward=lambda x: np.zeros_like(x),
            maximizer_cost=lambda t, z: np.full_like(z, 0.05),
            minimizer_cost=lambda t, z: np.abs(z) + 0.1,
            cost_floor=0.1,
        )
        report = validate(problem, grids.temporal, grids.spatial)
        assert not report.passed
        assert any(c.name == "cost floor positive" for c in report.failures)

    def test_terminal_compatibility_fails_for_cheap_impulses(self):
        # Oracle: with g(x) = x and flat cost 0.01, sup over the set of
        # g(x + z) - 0.01 = x + max(z) - 0.01 > g(x) at any node that can
        # jump up, by direct enumeration.
        grids = table_grids()
        problem = GameProblem(
            drift=lambda t, x: np.zeros_like(x),
            volatility=lambda t, x: np.zeros_like(x),
            running_reward=lambda t, x: np.zeros_like(x),
            terminal_reward=lambda x: np.asarray(x, dtype=float),
            maximizer_cost=lambda t, z: np.full_like(z, 0.01),
            minimizer_cost=lambda t, z: np.abs(z) + 0.1,
            cost_floor=0.01,
        )
        sets = problem.maximizer_impulses(grids.spatial)
        worst = max(
            float(np.max(grids.spatial.nodes[i] + z - 0.01 - grids.spatial.nodes[i]))
            for i, z in enumerate(sets)
            if z.size
        )
        assert worst > 0.0
        report = validate(problem, grids.temporal, grids.spatial)
        assert any(c.name == "terminal compatibility" for c in report.failures)

    def test_subadditivity_violation_detected(self):
        # Concave cost sqrt(|z|) + 0.1 is subadditive; a superadditive cost
        # like z^2 + 0.1 must trip the check.
        grids = table_grids(steps=4, intervals=10)
        problem = GameProblem(
            drift=lambda t, x: np.zeros_like(x),
            volatility=lambda t, x: np.zeros_like(x),
            running_reward=lambda t, x: np.zeros_like(x),
            terminal_reward=lambda x: np.zeros_like(x),
            maximizer_cost=lambda t, z: z**2 + 0.1,
            minimizer_cost=lambda t, z: np.abs(z) + 0.1,
            cost_floor=0.1,
        )
        report = validate(problem, grids.temporal, grids.spatial)
        assert any(c.name == "maximizer cost subadditive" for c in report.failures)


class TestExchangeInstance:
    def test_running_reward_peak_and_norm(self, exchange):
        problem, grids = exchange
        nodes = grids.spatial.nodes
        f = evaluate_coefficient(problem.running_reward, 0.0, nodes)
        assert f.max() == 0.0
        assert nodes[np.argmax(f)] == 1.0
        assert np.max(np.abs(f)) == max((0.0 - 1.0) ** 2, (5.0 - 1.0) ** 2) == 16.0

    def test_coefficients_match_declared_form(self):
        problem = ExchangeRateInstance(drift_speed=0.4, volatility=0.2).build()
        x = np.array([0.0, 1.0, 2.5])
        np.testing.assert_allclose(problem.drift(0.3, x), -0.4 * x)
        np.testing.assert_allclose(problem.volatility(0.3, x), 0.2 * x)
        np.testing.assert_allclose(problem.running_reward(0.3, x), -((x - 1.0) ** 2))
        np.testing.assert_allclose(problem.terminal_reward(x), 0.0)
        z = np.array([-0.5, 2.0])
        np.testing.assert_allclose(problem.maximizer_cost(0.0, z), np.abs(z) + 0.1)

    def test_discount_factor(self):
        problem = ExchangeRateInstance(discount_rate=0.5).build()
        assert problem.step_discount(0.05) == pytest.approx(np.exp(-0.025), rel=0, abs=0)
        undiscounted = ExchangeRateInstance().build()
        assert undiscounted.step_discount(0.05) == 1.0
