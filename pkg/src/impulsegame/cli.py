"""Command-line front end.

Reads a sectioned key=value configuration, runs one of the subcommands
solve | strategy | verify | refine | mc, and writes CSV tables plus a run
manifest into the output directory.  Configuration problems exit with code
1 before any file is written; numerical failures (degenerate pivot,
non-convergence) exit with code 2.

Output files and their column schemas:

    value_surface.csv  t (years), x (rate), V (payoff)
    slice_t0.csv       x (rate), V (payoff)
    regions.csv        t (years), x (rate), branch      branch in {C, MAX, MIN}
    path.csv           t (years), x_state (rate), value (payoff), action, impulse (rate)
                       action in {none, xi, eta}; impulse empty on 'none' rows
    refine.csv         level, h (years), gap (payoff)
    mc.csv             mean (payoff), standard_error (payoff), abs_gap (payoff), band (payoff)
    certificates.txt   one [PASS]/[FAIL] line per certificate
    manifest.txt       config echo, versions, timings

Rows are emitted in a fixed order (time ascending, then space ascending)
and floats use shortest round-trip decimal formatting, so reruns with the
same config and seed produce byte-identical CSV payloads.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .operators import interpolate
from .problem import (
    CheckResult,
    ExchangeRateInstance,
    GameProblem,
    Grids,
    SpatialGrid,
    TemporalGrid,
    build_impulse_sets,
    validate,
)
from .scheme import BRANCH_LABELS, CONTINUATION, MAXIMIZER, MINIMIZER, SolverError, assemble_matrix, solve
from .strategy import extract_strategy, simulate_payoff
from .verify import certify_monotone_inverse, certify_scheme, classify_matrix, refinement_study

__all__ = ["main", "ConfigError", "ValidationFailure", "RunConfig", "load_config"]


class ConfigError(ValueError):
    """Configuration file cannot be parsed or fails its invariants."""


class ValidationFailure(RuntimeError):
    """The configured problem instance violates a standing assumption."""


_COMMON_PROBLEM_KEYS = {
    "kind",
    "discount_rate",
    "proportional_cost_max",
    "proportional_cost_min",
    "fixed_cost_max",
    "fixed_cost_min",
}
_EXCHANGE_KEYS = _COMMON_PROBLEM_KEYS | {"drift_speed", "volatility", "target_rate"}
_CUSTOM_KEYS = _COMMON_PROBLEM_KEYS | {
    "drift_const",
    "drift_linear",
    "volatility_const",
    "volatility_linear",
    "reward_const",
    "reward_linear",
    "reward_quad",
    "target_rate",
    "terminal_const",
    "terminal_linear",
}
_SECTION_KEYS = {
    "grid": {"horizon", "time_steps", "x_min", "x_max", "space_intervals", "impulse_stride"},
    "run": {"x_start", "tolerance"},
    "monte_carlo": {"paths", "seed"},
    "output": {"directory"},
}


@dataclass
class RunConfig:
    """Typed view of one configuration file."""

    kind: str = "exchange"
    discount_rate: float = 0.0
    drift_speed: float = 0.25
    volatility: float = 0.30
    target_rate: float = 1.0
    proportional_cost_max: float = 1.0
    proportional_cost_min: float = 1.0
    fixed_cost_max: float = 0.1
    fixed_cost_min: float = 0.1
    drift_const: float = 0.0
    drift_linear: float = 0.0
    volatility_const: float = 0.0
    volatility_linear: float = 0.0
    reward_const: float = 0.0
    reward_linear: float = 0.0
    reward_quad: float = 0.0
    terminal_const: float = 0.0
    terminal_linear: float = 0.0
    horizon: float = 1.0
    time_steps: int = 20
    x_min: float = 0.0
    x_max: float = 5.0
    space_intervals: int = 100
    impulse_stride: int = 1
    x_start: float = 2.5
    tolerance: float = 1e-9
    paths: int = 10000
    seed: int = 1234
    directory: str = "out"
    source_text: str = field(default="", repr=False)

    def grids(self) -> Grids:
        return Grids(
            TemporalGrid(self.horizon, self.time_steps),
            SpatialGrid(self.x_min, self.x_max, self.space_intervals),
        )

    def problem(self) -> GameProblem:
        if self.kind == "exchange":
            instance = ExchangeRateInstance(
                drift_speed=self.drift_speed,
                volatility=self.volatility,
                target_rate=self.target_rate,
                proportional_cost_max=self.proportional_cost_max,
                proportional_cost_min=self.proportional_cost_min,
                fixed_cost_max=self.fixed_cost_max,
                fixed_cost_min=self.fixed_cost_min,
                discount_rate=self.discount_rate,
                x_start=self.x_start,
            )
            return instance.build(self.impulse_stride)
        return self._custom_problem()

    def _custom_problem(self) -> GameProblem:
        b0, b1 = self.drift_const, self.drift_linear
        s0, s1 = self.volatility_const, self.volatility_linear
        f0, f1, f2 = self.reward_const, self.reward_linear, self.reward_quad
        g0, g1 = self.terminal_const, self.terminal_linear
        target = self.target_rate
        lam_max, k_max = self.proportional_cost_max, self.fixed_cost_max
        lam_min, k_min = self.proportional_cost_min, self.fixed_cost_min
        stride = self.impulse_stride
        return GameProblem(
            drift=lambda t, x: b0 + b1 * x,
            volatility=lambda t, x: s0 + s1 * x,
            running_reward=lambda t, x: f0 + f1 * x + f2 * (x - target) ** 2,
            terminal_reward=lambda x: g0 + g1 * np.asarray(x, dtype=float),
            maximizer_cost=lambda t, z: lam_max * np.abs(z) + k_max,
            minimizer_cost=lambda t, z: lam_min * np.abs(z) + k_min,
            cost_floor=min(k_max, k_min),
            discount_rate=self.discount_rate,
            maximizer_impulses=lambda g: build_impulse_sets(g, stride),
            minimizer_impulses=lambda g: build_impulse_sets(g, stride),
        )


def _parse_sections(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current: "str | None" = None
    errors: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        if current is None:
            errors.append(f"line {lineno}: key outside any [section]")
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        if key in sections[current]:
            errors.append(f"line {lineno}: duplicate key {key!r} in section [{current}]")
            continue
        sections[current][key] = (value.strip(), lineno)
    if errors:
        raise ConfigError("\n".join(errors))
    return sections


_FIELD_TYPES = {
    "kind": str,
    "time_steps": int,
    "space_intervals": int,
    "impulse_stride": int,
    "paths": int,
    "seed": int,
    "directory": str,
}


def _coerce(cfg: RunConfig, key: str, value: str, lineno: int, errors: list[str]) -> None:
    kind = _FIELD_TYPES.get(key, float)
    try:
        setattr(cfg, key, kind(value))
    except ValueError:
        errors.append(f"line {lineno}: key {key!r} expects {kind.__name__}, got {value!r}")


def load_config(path: "str | Path") -> RunConfig:
    """Parse and validate a configuration file (raises ConfigError)."""
    text = Path(path).read_text()
    sections = _parse_sections(text)
    cfg = RunConfig(source_text=text)
    errors: list[str] = []

    known_sections = {"problem"} | set(_SECTION_KEYS)
    for name in sections:
        if name not in known_sections:
            errors.append(f"unknown section [{name}]")

    problem_keys = sections.get("problem", {})
    kind = problem_keys.get("kind", ("exchange", 0))[0]
    if kind not in ("exchange", "custom"):
        errors.append(f"problem kind must be 'exchange' or 'custom', got {kind!r}")
        kind = "exchange"
    allowed = _EXCHANGE_KEYS if kind == "exchange" else _CUSTOM_KEYS
    for key, (value, lineno) in problem_keys.items():
        if key not in allowed:
            errors.append(f"line {lineno}: unknown key {key!r} in section [problem] for kind {kind!r}")
            continue
        _coerce(cfg, key, value, lineno, errors)
    for section, allowed_keys in _SECTION_KEYS.items():
        for key, (value, lineno) in sections.get(section, {}).items():
            if key not in allowed_keys:
                errors.append(f"line {lineno}: unknown key {key!r} in section [{section}]")
                continue
            _coerce(cfg, key, value, lineno, errors)
    if errors:
        raise ConfigError("\n".join(errors))

    _check_invariants(cfg)
    return cfg


def _check_invariants(cfg: RunConfig) -> None:
    errors = []
    if cfg.horizon <= 0:
        errors.append(f"horizon must be positive, got {cfg.horizon}")
    if cfg.time_steps < 1:
        errors.append(f"time_steps must be >= 1, got {cfg.time_steps}")
    if cfg.space_intervals < 2:
        errors.append(f"space_intervals must be >= 2, got {cfg.space_intervals}")
    if cfg.impulse_stride < 1:
        errors.append(f"impulse_stride must be >= 1, got {cfg.impulse_stride}")
    if cfg.space_intervals < 2 * cfg.impulse_stride:
        errors.append(f"need space_intervals >= 2*impulse_stride, got {cfg.space_intervals} < {2 * cfg.impulse_stride}")
    if not cfg.x_min < cfg.x_max:
        errors.append(f"need x_min < x_max, got [{cfg.x_min}, {cfg.x_max}]")
    if not cfg.x_min < cfg.x_start < cfg.x_max:
        errors.append(f"need x_min < x_start < x_max, got x_start={cfg.x_start} in [{cfg.x_min}, {cfg.x_max}]")
    if cfg.tolerance <= 0:
        errors.append(f"tolerance must be positive, got {cfg.tolerance}")
    if cfg.paths < 100:
        errors.append(f"monte_carlo paths must be >= 100, got {cfg.paths}")
    if cfg.discount_rate < 0:
        errors.append(f"discount_rate must be >= 0, got {cfg.discount_rate}")
    if min(cfg.fixed_cost_max, cfg.fixed_cost_min) <= 0:
        errors.append("fixed costs must be positive (cost floor k > 0)")
    if errors:
        raise ConfigError("\n".join(errors))


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_csv(path: Path, header: str, rows: "list[str]") -> None:
    path.write_text(header + "\n" + "\n".join(rows) + ("\n" if rows else ""))


def _validated(cfg: RunConfig) -> tuple[GameProblem, Grids]:
    problem = cfg.problem()
    grids = cfg.grids()
    report = validate(problem, grids.temporal, grids.spatial)
    if not report.passed:
        raise ValidationFailure("problem validation failed:\n" + report.to_text())
    return problem, grids


def _write_manifest(out_dir: Path, cfg: RunConfig, timings: dict[str, float]) -> None:
    lines = [
        f"impulsegame {__version__}",
        f"python {sys.version.split()[0]}",
        f"numpy {np.__version__}",
        "",
        "[timings]",
    ]
    lines += [f"{name} = {seconds:.3f} s" for name, seconds in timings.items()]
    lines += ["", "[config]", cfg.source_text.rstrip("\n")]
    (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


_ACTION_NAMES = {CONTINUATION: "none", MAXIMIZER: "xi", MINIMIZER: "eta"}


def run_solve(cfg: RunConfig, out_dir: Path) -> None:
    problem, grids = _validated(cfg)
    started = time.perf_counter()
    result = solve(problem, grids)
    elapsed = time.perf_counter() - started

    out_dir.mkdir(parents=True, exist_ok=True)
    times = grids.temporal.nodes
    nodes = grids.spatial.nodes
    n_levels = grids.temporal.steps

    surface_rows = []
    region_rows = []
    for n in range(n_levels, -1, -1):
        t_txt = _fmt(times[n])
        for i, x in enumerate(nodes):
            surface_rows.append(f"{t_txt},{_fmt(x)},{_fmt(result.values[n, i])}")
            region_rows.append(f"{t_txt},{_fmt(x)},{BRANCH_LABELS[int(result.branch[n, i])]}")
    _write_csv(out_dir / "value_surface.csv", "t (years),x (rate),V (payoff)", surface_rows)
    _write_csv(out_dir / "regions.csv", "t (years),x (rate),branch", region_rows)
    slice_rows = [f"{_fmt(x)},{_fmt(v)}" for x, v in zip(nodes, result.values[n_levels])]
    _write_csv(out_dir / "slice_t0.csv", "x (rate),V (payoff)", slice_rows)
    _write_manifest(out_dir, cfg, {"solve": elapsed})


def run_strategy(cfg: RunConfig, out_dir: Path) -> None:
    problem, grids = _validated(cfg)
    started = time.perf_counter()
    result = solve(problem, grids)
    record = extract_strategy(result, problem, grids, cfg.x_start)
    elapsed = time.perf_counter() - started

    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for t, x, v, action, impulse in zip(
        record.times, record.states, record.values, record.actions, record.impulses
    ):
        impulse_txt = _fmt(impulse) if int(action) != CONTINUATION else ""
        rows.append(f"{_fmt(t)},{_fmt(x)},{_fmt(v)},{_ACTION_NAMES[int(action)]},{impulse_txt}")
    _write_csv(out_dir / "path.csv", "t (years),x_state (rate),value (payoff),action,impulse (rate)", rows)
    _write_manifest(out_dir, cfg, {"solve+extract": elapsed})


def run_verify(cfg: RunConfig, out_dir: Path) -> bool:
    problem = cfg.problem()
    grids = cfg.grids()
    started = time.perf_counter()
    report = validate(problem, grids.temporal, grids.spatial)
    certificates = certify_scheme(problem, grids, trials=100, seed=cfg.seed)

    matrix_checks = []
    worst_inverse = None
    all_classified = True
    for n in range(1, grids.temporal.steps + 1):
        operator = assemble_matrix(n, problem, grids)
        cls = classify_matrix(operator)
        all_classified &= cls.sdd and cls.wcdd and cls.z_matrix and cls.min_diagonal > 0.0
        if grids.spatial.intervals + 1 <= 200:
            inverse = certify_monotone_inverse(operator)
            if worst_inverse is None or not inverse.passed:
                worst_inverse = inverse
            elif (
                worst_inverse.passed
                and inverse.measured is not None
                and worst_inverse.measured is not None
                and inverse.measured < worst_inverse.measured
            ):
                worst_inverse = inverse
    matrix_checks.append(
        CheckResult(
            "timestep operator class (SDD, WCDD, Z, positive diagonal)",
            bool(all_classified),
            detail=f"all {grids.temporal.steps} assembled operators",
        )
    )
    if worst_inverse is not None:
        matrix_checks.append(worst_inverse)
    elapsed = time.perf_counter() - started

    out_dir.mkdir(parents=True, exist_ok=True)
    text = (
        "# problem validation\n"
        + report.to_text()
        + "# scheme certificates\n"
        + certificates.to_text()
        + "# matrix certificates\n"
        + "\n".join(c.line() for c in matrix_checks)
        + "\n"
    )
    (out_dir / "certificates.txt").write_text(text)
    _write_manifest(out_dir, cfg, {"verify": elapsed})
    return report.passed and certificates.passed and all(c.passed for c in matrix_checks)


def run_refine(cfg: RunConfig, out_dir: Path, levels: int) -> None:
    problem, grids = _validated(cfg)
    started = time.perf_counter()
    study = refinement_study(problem, grids, levels)
    elapsed = time.perf_counter() - started

    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [f"{lvl},{_fmt(h)},{_fmt(gap)}" for lvl, h, gap in study.rows()]
    _write_csv(out_dir / "refine.csv", "level,h (years),gap (payoff)", rows)
    _write_manifest(out_dir, cfg, {"refine": elapsed})


def run_mc(cfg: RunConfig, out_dir: Path) -> None:
    problem, grids = _validated(cfg)
    started = time.perf_counter()
    result = solve(problem, grids)
    estimate = simulate_payoff(problem, result, grids, cfg.x_start, cfg.paths, cfg.seed)
    study = refinement_study(problem, grids, levels=1)
    elapsed = time.perf_counter() - started

    value_at_start = float(interpolate(result.value_at_start, grids.spatial, cfg.x_start))
    gap = abs(estimate.mean - value_at_start)
    band = 3.0 * estimate.standard_error + float(study.gaps[0])

    out_dir.mkdir(parents=True, exist_ok=True)
    row = f"{_fmt(estimate.mean)},{_fmt(estimate.standard_error)},{_fmt(gap)},{_fmt(band)}"
    _write_csv(out_dir / "mc.csv", "mean (payoff),standard_error (payoff),abs_gap (payoff),band (payoff)", [row])
    _write_manifest(out_dir, cfg, {"solve+mc+refine": elapsed})


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impulsegame",
        description="Finite-horizon zero-sum impulse-game solver (double-obstacle timestep).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("solve", "solve the field and write value_surface/slice_t0/regions CSVs"),
        ("strategy", "solve and extract the optimal path (path.csv)"),
        ("verify", "run validation and numerical certificates (certificates.txt)"),
        ("refine", "joint (h, dx) refinement study (refine.csv)"),
        ("mc", "Monte Carlo payoff check against the solved value (mc.csv)"),
    ):
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--config", required=True, help="path to the configuration file")
        cmd.add_argument("--out", default=None, help="output directory (default: config [output] directory)")
        cmd.add_argument("--seed", type=int, default=None, help="override the Monte Carlo seed")
        if name == "refine":
            cmd.add_argument("--levels", type=int, default=3, help="number of joint halvings")
    return parser


def main(argv: "list[str] | None" = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        out_dir = Path(args.out) if args.out is not None else Path(cfg.directory)
        if args.command == "solve":
            run_solve(cfg, out_dir)
        elif args.command == "strategy":
            run_strategy(cfg, out_dir)
        elif args.command == "verify":
            run_verify(cfg, out_dir)
        elif args.command == "refine":
            if args.levels < 1:
                raise ConfigError(f"--levels must be >= 1, got {args.levels}")
            run_refine(cfg, out_dir, args.levels)
        elif args.command == "mc":
            run_mc(cfg, out_dir)
    except (ConfigError, FileNotFoundError, ValidationFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0
