import numpy as np
import pytest

import impulsegame.verify as verify_mod
from impulsegame import (
    Grids,
    SpatialGrid,
    TemporalGrid,
    assemble_matrix,
    build_impulse_sets,
    certify_monotone_inverse,
    certify_scheme,
    classify_matrix,
    hausdorff_gap,
    refinement_study,
)
from impulsegame.scheme import TridiagonalOperator

from conftest import forcing_problem, table_grids, zero_game_problem


class TestClassifyMatrix:
    def test_assembled_operator(self, exchange):
        problem, grids = exchange
        for n in (1, 10, 20):
            cls = classify_matrix(assemble_matrix(n, problem, grids))
            assert cls.sdd and cls.wdd and cls.wcdd
            assert cls.z_matrix and cls.nonnegative_diagonal
            assert cls.min_diagonal > 0.0

    def test_balanced_rows_not_wcdd(self):
        cls = classify_matrix(np.array([[1.0, -1.0], [-1.0, 1.0]]))
        assert cls.wdd and not cls.sdd and not cls.wcdd

    def test_identity(self):
        cls = classify_matrix(np.eye(4))
        assert cls.sdd and cls.wcdd and cls.z_matrix

    def test_chained_but_not_strict(self):
        # Row 1 is only weakly dominant but chains to the strict row 0.
        cls = classify_matrix(np.array([[2.0, -1.0], [-1.0, 1.0]]))
        assert not cls.sdd and cls.wdd and cls.wcdd

    def test_chain_broken_by_zero_entry(self):
        matrix = np.array([[2.0, 0.0, 0.0], [0.0, 1.0, -1.0], [0.0, -1.0, 1.0]])
        cls = classify_matrix(matrix)
        assert cls.wdd and not cls.wcdd

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            classify_matrix(np.ones((2, 3)))


class TestCertifyMonotoneInverse:
    def test_assembled_operator_passes(self, exchange):
        problem, _ = exchange
        grids = Grids(TemporalGrid(1.0, 20), SpatialGrid(0.0, 5.0, 50))
        check = certify_monotone_inverse(assemble_matrix(3, problem, grids))
        assert check.passed
        assert check.measured >= -1e-12

    def test_negative_diagonal_fails(self):
        check = certify_monotone_inverse(np.diag([1.0, -1.0]))
        assert not check.passed
        assert check.measured == -1.0

    def test_identity_min_entry_zero(self):
        check = certify_monotone_inverse(np.eye(3))
        assert check.passed and check.measured == 0.0

    def test_singular_reported(self):
        check = certify_monotone_inverse(np.ones((2, 2)))
        assert not check.passed
        assert "singular" in check.detail

    def test_size_limit(self):
        with pytest.raises(ValueError):
            certify_monotone_inverse(np.eye(300))


class TestCertifyScheme:
    def test_exchange_all_pass(self, exchange):
        problem, grids = exchange
        report = certify_scheme(problem, grids, trials=100, seed=0)
        assert report.passed, report.to_text()

    def test_zero_game_all_pass(self, zero_game):
        problem, grids = zero_game
        report = certify_scheme(problem, grids, trials=20, seed=1)
        assert report.passed, report.to_text()

    def test_randomized_wellposed_instances(self):
        # |b| <= 1, 0.1 <= sigma <= 1, |f| <= 1, |g| <= 1, costs >= 0.1.
        rng = np.random.default_rng(12)
        grids = Grids(TemporalGrid(1.0, 5), SpatialGrid(-1.0, 1.0, 24))
        for _ in range(20):
            b0, f0 = rng.uniform(-1, 1, 2)
            s0 = rng.uniform(0.1, 1.0)
            g0 = rng.uniform(-1, 1)
            problem = zero_game_problem().__class__(
                drift=lambda t, x, b0=b0: np.full_like(x, b0),
                volatility=lambda t, x, s0=s0: np.full_like(x, s0),
                running_reward=lambda t, x, f0=f0: np.full_like(x, f0),
                terminal_reward=lambda x, g0=g0: np.full_like(np.asarray(x, dtype=float), g0),
                maximizer_cost=lambda t, z: np.abs(z) + 0.1,
                minimizer_cost=lambda t, z: np.abs(z) + 0.1,
                cost_floor=0.1,
            )
            report = certify_scheme(problem, grids, trials=6, seed=int(rng.integers(1 << 16)))
            assert report.passed, report.to_text()

    def test_corrupted_step_fails_monotonicity(self, zero_game, monkeypatch):
        # Mutation test: flip the sign of the off-diagonals during the
        # trials and the order-preservation certificate must go red.
        problem, grids = zero_game
        real_step = verify_mod.step

        def corrupted(v_prev, n, prob, grds, tables=None):
            row, report = real_step(v_prev, n, prob, grds, tables)
            return row - 0.5 * np.sign(v_prev) * np.abs(v_prev), report

        monkeypatch.setattr(verify_mod, "step", corrupted)
        report = verify_mod.certify_scheme(problem, grids, trials=10, seed=3)
        names = {c.name for c in report.failures}
        assert "timestep preserves entrywise order" in names


class TestRefinementStudy:
    def test_zero_game_gaps_vanish(self, zero_game):
        problem, _ = zero_game
        grids = Grids(TemporalGrid(1.0, 4), SpatialGrid(0.0, 5.0, 10))
        study = refinement_study(problem, grids, levels=2)
        np.testing.assert_array_equal(study.gaps, 0.0)

    def test_forcing_exact_at_every_resolution(self):
        problem = forcing_problem()
        grids = Grids(TemporalGrid(1.0, 4), SpatialGrid(0.0, 5.0, 10))
        study = refinement_study(problem, grids, levels=2)
        assert np.max(study.gaps) <= 1e-12

    def test_exchange_gaps_strictly_decreasing(self, exchange):
        problem, _ = exchange
        grids = Grids(TemporalGrid(1.0, 40), SpatialGrid(0.0, 5.0, 50))
        study = refinement_study(problem, grids, levels=3)
        assert study.decreasing, study.gaps
        assert study.step_sizes[0] == 0.025

    def test_rows_schema(self, zero_game):
        problem, _ = zero_game
        grids = Grids(TemporalGrid(1.0, 4), SpatialGrid(0.0, 5.0, 10))
        rows = refinement_study(problem, grids, levels=2).rows()
        assert [r[0] for r in rows] == [0, 1]
        assert rows[0][1] == 0.25 and rows[1][1] == 0.125


class TestHausdorffGap:
    def test_symmetric_pair_against_interval(self):
        assert hausdorff_gap(np.array([-1.0, 1.0]), (-1.0, 1.0)) == 1.0

    def test_singleton(self):
        assert hausdorff_gap(np.array([0.5]), (0.5, 0.5)) == 0.0

    def test_grid_multiples_within_spacing(self):
        grid = SpatialGrid(0.0, 5.0, 100)
        sets = build_impulse_sets(grid, 1)
        gap = hausdorff_gap(sets[50], (-2.5, 2.5))
        assert gap == pytest.approx(0.05, abs=1e-12)

    def test_matches_brute_force_sampling(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            values = np.sort(rng.uniform(-3, 3, rng.integers(1, 9)))
            lo = float(rng.uniform(-4, 0))
            hi = float(rng.uniform(0, 4))
            probes = np.linspace(lo, hi, 200001)
            to_set = np.max(np.min(np.abs(probes[:, None] - values[None, :]), axis=1))
            to_interval = np.max(np.maximum(np.maximum(lo - values, values - hi), 0.0))
            brute = max(float(to_set), float(to_interval))
            assert hausdorff_gap(values, (lo, hi)) == pytest.approx(brute, abs=1e-4)

    def test_set_point_outside_interval(self):
        # the interval end 0 is two away from the set; the set point is one
        # away from the interval; the max of the two directed gaps wins
        assert hausdorff_gap(np.array([2.0]), (0.0, 1.0)) == 2.0

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            hausdorff_gap(np.empty(0), (0.0, 1.0))
