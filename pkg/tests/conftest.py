"""Shared instances: the exchange game plus degenerate games with known fields."""

from __future__ import annotations

import numpy as np
import pytest

from impulsegame import ExchangeRateInstance, GameProblem, Grids, SpatialGrid, TemporalGrid


def table_grids(steps: int = 20, intervals: int = 100) -> Grids:
    return Grids(TemporalGrid(1.0, steps), SpatialGrid(0.0, 5.0, intervals))


def zero_game_problem() -> GameProblem:
    """f = 0, g = 0, costs >= 0.1, exchange-style dynamics: the field is 0."""
    return GameProblem(
        drift=lambda t, x: -0.25 * x,
        volatility=lambda t, x: 0.30 * x,
        running_reward=lambda t, x: np.zeros_like(x),
        terminal_reward=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        maximizer_cost=lambda t, z: np.abs(z) + 0.1,
        minimizer_cost=lambda t, z: np.abs(z) + 0.1,
        cost_floor=0.1,
    )


def forcing_problem() -> GameProblem:
    """sigma = 0, b = 0, f = 1, g = 0: the exact field is V^n = n*h."""
    return GameProblem(
        drift=lambda t, x: np.zeros_like(x),
        volatility=lambda t, x: np.zeros_like(x),
        running_reward=lambda t, x: np.ones_like(x),
        terminal_reward=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        maximizer_cost=lambda t, z: np.abs(z) + 0.1,
        minimizer_cost=lambda t, z: np.abs(z) + 0.1,
        cost_floor=0.1,
    )


@pytest.fixture
def exchange() -> tuple[GameProblem, Grids]:
    return ExchangeRateInstance().build(), table_grids()


@pytest.fixture
def zero_game() -> tuple[GameProblem, Grids]:
    return zero_game_problem(), table_grids()


@pytest.fixture
def forcing() -> tuple[GameProblem, Grids]:
    return forcing_problem(), table_grids()
