"""Forward pass: equilibrium impulse strategies and a Monte Carlo payoff oracle.

Both routines replay the solved field forward in physical time.  At forward
time t_k = k*h the state sits at backward level n = N - k, and a player
intervenes exactly where its obstacle binds in the timestep's branch
selection there:

    minimizer: inf-obstacle^n(x) < max(continuation^n(x), sup-obstacle^n(x))
               (checked first: the minimizer has priority on simultaneous
               triggers)
    maximizer: sup-obstacle^n(x) > continuation^n(x)

This is the solved-versus-obstacle comparison with the half-step diffusion
correction cancelled from both sides: the solved row equals the binding
branch plus that correction, so comparing it against an obstacle directly
degenerates to a tie on the whole active region.  At grid nodes the rule
reproduces the branch provenance recorded during the solve bit for bit;
off-grid states interpolate the three nodewise branch rows.  The applied
impulse is the nearest node's recorded optimizer and the post-impulse
state is clipped into the domain.  An intervention consumes the whole
step: no drift, diffusion, or running reward accrues in it, mirroring the
obstacle branch of the timestep, which reads the previous level directly
net of cost.

The Monte Carlo estimator drives Euler-Maruyama paths with these same
feedback triggers (rather than the precomputed deterministic record,
because stochastic paths visit states the deterministic pass never sees)
and accumulates the discounted payoff: running reward plus minimizer costs
minus maximizer costs plus terminal reward.  Paths are independent and the
generator is seeded, so identical seeds reproduce identical estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import interpolate
from .problem import GameProblem, Grids, evaluate_coefficient, evaluate_terminal
from .scheme import CONTINUATION, MAXIMIZER, MINIMIZER, SolveResult

__all__ = ["StrategyRecord", "MonteCarloEstimate", "extract_strategy", "simulate_payoff"]


@dataclass(frozen=True)
class StrategyRecord:
    """Optimal state path with both players' intervention sequences.

    ``times[k]`` is the forward time t_k, ``states[k]`` the state before any
    action at t_k, ``values[k]`` the interpolated solved value there.
    ``actions[k]`` is 0 (none), 1 (maximizer impulse), or 2 (minimizer
    impulse); ``impulses[k]`` holds the applied jump (NaN when none).
    """

    times: np.ndarray
    states: np.ndarray
    values: np.ndarray
    actions: np.ndarray
    impulses: np.ndarray

    @property
    def maximizer_interventions(self) -> tuple[tuple[float, float], ...]:
        mask = self.actions == MAXIMIZER
        return tuple(zip(self.times[mask], self.impulses[mask]))

    @property
    def minimizer_interventions(self) -> tuple[tuple[float, float], ...]:
        mask = self.actions == MINIMIZER
        return tuple(zip(self.times[mask], self.impulses[mask]))


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    standard_error: float
    paths: int
    seed: int


def extract_strategy(result: SolveResult, problem: GameProblem, grids: Grids, x_start: float) -> StrategyRecord:
    """Walk the deterministic optimal path from t = 0 to T.

    Between interventions the state follows the drift step
    x <- x + h*b(t_k, x); priorities and trigger conditions are as in the
    module docstring.  ``x_start`` must lie inside the spatial domain.
    """
    spatial = grids.spatial
    if not spatial.x_min <= x_start <= spatial.x_max:
        raise ValueError(f"x_start {x_start} outside the grid [{spatial.x_min}, {spatial.x_max}]")
    n_levels = grids.temporal.steps
    h = grids.temporal.h

    times = np.empty(n_levels + 1)
    states = np.empty(n_levels + 1)
    values = np.empty(n_levels + 1)
    actions = np.full(n_levels + 1, CONTINUATION, dtype=np.int8)
    impulses = np.full(n_levels + 1, np.nan)

    x = float(x_start)
    for k in range(n_levels):
        n = n_levels - k
        t = float(grids.temporal.nodes[n])
        times[k], states[k] = t, x
        values[k] = interpolate(result.values[n], spatial, x)
        cont = interpolate(result.continuation[n], spatial, x)
        sup = interpolate(result.sup_value[n], spatial, x)
        inf = interpolate(result.inf_value[n], spatial, x)
        node = spatial.nearest_index(x)
        eta = float(result.inf_impulse[n][node])
        xi = float(result.sup_impulse[n][node])
        if inf < max(cont, sup) and np.isfinite(eta):
            actions[k] = MINIMIZER
            impulses[k] = eta
            x = float(np.clip(x + eta, spatial.x_min, spatial.x_max))
        elif sup > cont and np.isfinite(xi):
            actions[k] = MAXIMIZER
            impulses[k] = xi
            x = float(np.clip(x + xi, spatial.x_min, spatial.x_max))
        else:
            drift = float(evaluate_coefficient(problem.drift, t, np.asarray([x]))[0])
            x = float(np.clip(x + h * drift, spatial.x_min, spatial.x_max))
    times[n_levels] = float(grids.temporal.nodes[0])
    states[n_levels] = x
    values[n_levels] = interpolate(result.values[0], spatial, x)
    return StrategyRecord(times=times, states=states, values=values, actions=actions, impulses=impulses)


def simulate_payoff(
    problem: GameProblem,
    result: SolveResult,
    grids: Grids,
    x_start: float,
    path_count: int,
    seed: int,
) -> MonteCarloEstimate:
    """Seeded Euler-Maruyama estimate of the expected payoff under the
    feedback strategies induced by the solved field.

    Sign convention: maximizer intervention costs subtract from the payoff,
    minimizer intervention costs add to it, running and terminal rewards
    are discounted back to time 0 by exp(-rate*t).  States are clipped into
    the computational domain after every update, mirroring the truncated
    dynamics the backward solve sees through its clamped interpolation.
    """
    if path_count < 100:
        raise ValueError(f"path_count must be >= 100, got {path_count}")
    spatial = grids.spatial
    if not spatial.x_min <= x_start <= spatial.x_max:
        raise ValueError(f"x_start {x_start} outside the grid [{spatial.x_min}, {spatial.x_max}]")
    n_levels = grids.temporal.steps
    h = grids.temporal.h
    sqrt_h = np.sqrt(h)
    rate = problem.discount_rate
    rng = np.random.default_rng(seed)

    x = np.full(path_count, float(x_start))
    payoff = np.zeros(path_count)
    for k in range(n_levels):
        n = n_levels - k
        t = float(grids.temporal.nodes[n])
        disc_t = float(np.exp(-rate * t))
        cont = interpolate(result.continuation[n], spatial, x)
        sup = interpolate(result.sup_value[n], spatial, x)
        inf = interpolate(result.inf_value[n], spatial, x)
        node = spatial.nearest_index(x)
        eta = result.inf_impulse[n][node]
        xi = result.sup_impulse[n][node]
        with np.errstate(invalid="ignore"):
            act_min = (inf < np.maximum(cont, sup)) & np.isfinite(eta)
            act_max = ~act_min & (sup > cont) & np.isfinite(xi)
        if np.any(act_min):
            z = eta[act_min]
            payoff[act_min] += disc_t * evaluate_coefficient(problem.minimizer_cost, t, z)
            x[act_min] = np.clip(x[act_min] + z, spatial.x_min, spatial.x_max)
        if np.any(act_max):
            z = xi[act_max]
            payoff[act_max] -= disc_t * evaluate_coefficient(problem.maximizer_cost, t, z)
            x[act_max] = np.clip(x[act_max] + z, spatial.x_min, spatial.x_max)
        diffuse = ~(act_min | act_max)
        noise = rng.standard_normal(path_count)
        if np.any(diffuse):
            xc = x[diffuse]
            payoff[diffuse] += h * disc_t * evaluate_coefficient(problem.running_reward, t, xc)
            drifted = xc + h * evaluate_coefficient(problem.drift, t, xc)
            drifted += sqrt_h * evaluate_coefficient(problem.volatility, t, xc) * noise[diffuse]
            x[diffuse] = np.clip(drifted, spatial.x_min, spatial.x_max)
    payoff += float(np.exp(-rate * grids.temporal.horizon)) * evaluate_terminal(problem.terminal_reward, x)

    mean = float(np.mean(payoff))
    spread = float(np.std(payoff, ddof=1)) if path_count > 1 else 0.0
    return MonteCarloEstimate(
        mean=mean,
        standard_error=spread / float(np.sqrt(path_count)),
        paths=path_count,
        seed=seed,
    )
