"""Command-line entry point for the bundled experiments.

Subcommands (all write CSV logs into --out, floats with 17 significant
digits so files round-trip exactly):

  illustrative --eps V [--start w1,w2]   two-variable parametric problem
  crane        [--config PATH]           default point-to-point crane run
  inner-study  [--config PATH] --radii   feasibility iterations at the first
                                         outer iterate for several radii
  bench        [--config PATH] --seed N  perturbed-endpoint instance sweep

Common flags: --out DIR, --set key=value (repeatable; flat key namespace
over the solver parameters and the crane configuration; unknown keys are
rejected). Exit codes: 0 optimal, 2 solver non-optimal (or too many bench
failures), 3 configuration error, 4 initialization infeasible.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
from dataclasses import dataclass, replace
from multiprocessing import Pool
from typing import Optional

import numpy as np

from .crane import (CraneBounds, CraneConfig, InitializationError,
                    build_tocp, endpoint_slack_norm, feasible_initialization,
                    payload_position, perturb_problems)
from .illustrative import build_illustrative, known_optimum
from .inner import InnerParams, run_inner
from .lp import solve_lp
from .nlp import InfeasibleSlackError, assemble_w, linearize, minimal_slack
from .outer import (InfeasibleStartError, SolverParams, SolveStatus,
                    build_trust_region_lp, solve)

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_CONFIG = 3
EXIT_INIT = 4

ZERO_SLACK_TOL = 1e-6


class ConfigError(ValueError):
    """Bad configuration file, unknown override key, or invalid value."""


@dataclass
class RunManifest:
    """Parsed invocation: which experiment, where to read and write, and the
    flat parameter overrides."""

    experiment: str
    config_path: Optional[str]
    out_dir: str
    seed: int
    overrides: dict


# -- value formatting and CSV -------------------------------------------------

def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


# -- parameter plumbing -------------------------------------------------------

_SOLVER_FLOATS = ("delta0", "delta_max", "sigma", "sigma_outer",
                  "alpha1", "alpha2", "eta1", "eta2")
_SOLVER_INTS = ("max_outer_iterations",)
_INNER_FLOATS = ("sigma_inner", "kappa_watch", "ratio_abort", "ratio_accept")
_INNER_INTS = ("n_watch", "n_max")
_CRANE_FLOATS = ("gravity", "r_load", "slack_penalty", "T_init")
_CRANE_INTS = ("n_intervals", "rk4_substeps")
_CRANE_PAIRS = ("start_payload", "end_payload", "u_init")
_BOUND_KEYS = {"state_lower": 6, "state_upper": 6, "control_lower": 2,
               "control_upper": 2}
_BOUND_SCALARS = ("t_lower", "t_upper", "hyperplane_box")

SOLVER_KEYS = set(_SOLVER_FLOATS) | set(_SOLVER_INTS) | set(_INNER_FLOATS) | set(_INNER_INTS)
CRANE_KEYS = (set(_CRANE_FLOATS) | set(_CRANE_INTS) | set(_CRANE_PAIRS)
              | {"obstacle_vertices"} | set(_BOUND_KEYS) | set(_BOUND_SCALARS))


def _parse_floats(text, count, key):
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse '{text}' as numbers") from exc
    if count is not None and len(vals) != count:
        raise ConfigError(f"{key}: expected {count} numbers, got {len(vals)}")
    return vals


def parse_overrides(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in SOLVER_KEYS and key not in CRANE_KEYS:
            raise ConfigError(f"unknown override key '{key}'")
        out[key] = value.strip()
    return out


def read_config_file(path) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (T_init)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    out = {}
    for section in parser.sections():
        if section not in ("crane", "solver"):
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in (CRANE_KEYS if section == "crane" else SOLVER_KEYS):
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            out[key] = value
    return out


def _apply(value, caster, key):
    try:
        return caster(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: invalid value '{value}'") from exc


def make_crane_config(settings: dict) -> CraneConfig:
    cfg_kwargs = {}
    bounds_kwargs = {}
    for key, value in settings.items():
        if key in _CRANE_FLOATS:
            cfg_kwargs[key] = _apply(value, float, key)
        elif key in _CRANE_INTS:
            cfg_kwargs[key] = _apply(value, int, key)
        elif key in _CRANE_PAIRS:
            cfg_kwargs[key] = tuple(_parse_floats(value, 2, key))
        elif key == "obstacle_vertices":
            vals = _parse_floats(value, 8, key)
            cfg_kwargs[key] = tuple((vals[2 * i], vals[2 * i + 1]) for i in range(4))
        elif key in _BOUND_KEYS:
            bounds_kwargs[key] = tuple(_parse_floats(value, _BOUND_KEYS[key], key))
        elif key in _BOUND_SCALARS:
            bounds_kwargs[key] = _apply(value, float, key)
    try:
        bounds = CraneBounds(**bounds_kwargs) if bounds_kwargs else CraneBounds()
        return CraneConfig(bounds=bounds, **cfg_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def make_solver_params(settings: dict) -> SolverParams:
    solver_kwargs = {}
    inner_kwargs = {}
    for key, value in settings.items():
        if key in _SOLVER_FLOATS:
            solver_kwargs[key] = _apply(value, float, key)
        elif key in _SOLVER_INTS:
            solver_kwargs[key] = _apply(value, int, key)
        elif key in _INNER_FLOATS:
            inner_kwargs[key] = _apply(value, float, key)
        elif key in _INNER_INTS:
            inner_kwargs[key] = _apply(value, int, key)
    try:
        return SolverParams(inner=InnerParams(**inner_kwargs), **solver_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def gather_settings(config_path, overrides) -> dict:
    settings = read_config_file(config_path) if config_path else {}
    settings.update(overrides)
    return settings


# -- shared pieces ------------------------------------------------------------

def _inner_rows(prefix, trace):
    rows = []
    for r in trace.rows:
        rows.append(list(prefix) + [r.l, r.infeasibility, r.ratio,
                                    r.kappa, trace.status.value])
    return rows


def _solve_crane(cfg: CraneConfig, params: SolverParams):
    problem, layout = build_tocp(cfg)
    w0 = feasible_initialization(cfg, layout)
    result = solve(problem, w0, params)
    return problem, layout, result


def first_zero_slack_iteration(result, layout) -> Optional[int]:
    for rec, w in zip(result.history, result.points):
        if rec.infeasibility <= 1e-7 and endpoint_slack_norm(w, layout) <= ZERO_SLACK_TOL:
            return rec.k
    return None


class CountingFunction:
    """Callable wrapper counting invocations (constraint-evaluation metric)."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, arg):
        self.calls += 1
        return self.fn(arg)


# -- experiment runners -------------------------------------------------------

def run_illustrative(eps: float, out_dir: str, overrides=None,
                     start=(2.0, 10.0)) -> int:
    if not math.isfinite(eps):
        raise ConfigError("eps must be finite")
    params = make_solver_params(overrides or {})
    problem = build_illustrative(eps)
    y0 = np.asarray(start, dtype=float)
    try:
        w0 = assemble_w(problem, y0, minimal_slack(problem, y0))
    except InfeasibleSlackError as exc:
        raise InitializationError(str(exc)) from exc
    result = solve(problem, w0, params)
    w_star = known_optimum(eps)
    rows = []
    for rec, w in zip(result.history, result.points):
        err = None if w_star is None else float(np.linalg.norm(w[:2] - w_star))
        rows.append([rec.k, w[0], w[1], err, rec.radius, rec.rho,
                     rec.accepted])
    write_csv(os.path.join(out_dir, "illustrative.csv"),
              ["k", "w1", "w2", "error", "delta", "rho", "accepted"], rows)
    print(f"illustrative eps={eps:g}: {result.status.value} after "
          f"{len(result.history)} iterations, final=({result.final_point[0]:.9g}, "
          f"{result.final_point[1]:.9g})")
    return EXIT_OK if result.status is SolveStatus.OPTIMAL else EXIT_SOLVER


def run_crane(config_path: Optional[str], out_dir: str, overrides=None) -> int:
    settings = gather_settings(config_path, overrides or {})
    cfg = make_crane_config(settings)
    params = make_solver_params(settings)
    problem, layout, result = _solve_crane(cfg, params)

    outer_rows = [[r.k, r.objective, r.infeasibility, r.radius,
                   r.model_decrease, r.rho, r.accepted, r.inner_iterations,
                   r.inner_status.value, r.step_norm] for r in result.history]
    write_csv(os.path.join(out_dir, "crane_outer.csv"),
              ["k", "objective", "infeasibility", "radius", "model_decrease",
               "rho", "accepted", "inner_iterations", "inner_status",
               "step_norm"], outer_rows)

    inner_rows = []
    for rec, trace in zip(result.history, result.inner_traces):
        if trace is not None:
            inner_rows.extend(_inner_rows([rec.k], trace))
    write_csv(os.path.join(out_dir, "crane_inner.csv"),
              ["outer_k", "inner_l", "h", "ratio", "kappa", "status"], inner_rows)

    traj_rows = []
    previous = None
    labeled = [(rec.k, w) for rec, w in zip(result.history, result.points)]
    labeled.append((len(result.history), result.final_point))
    for k, w in labeled:
        if previous is not None and np.array_equal(w, previous):
            continue
        previous = w
        path = payload_position(layout.states(w))
        for stage, (px, py) in enumerate(path):
            traj_rows.append([k, stage, px, py])
    write_csv(os.path.join(out_dir, "crane_trajectories.csv"),
              ["k", "stage", "p_x", "p_y"], traj_rows)

    zs = first_zero_slack_iteration(result, layout)
    print(f"crane: {result.status.value} after {len(result.history)} outer "
          f"iterations, T={layout.horizon(result.final_point):.9g} s, "
          f"first zero-slack iterate: {zs if zs is not None else 'never'}")
    return EXIT_OK if result.status is SolveStatus.OPTIMAL else EXIT_SOLVER


def run_inner_study(config_path: Optional[str], radii, out_dir: str,
                    overrides=None) -> int:
    if not radii:
        raise ConfigError("at least one radius is required")
    if any(r <= 0 for r in radii):
        raise ConfigError("radii must be positive")
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ConfigError("radii must be strictly descending")
    settings = gather_settings(config_path, overrides or {})
    cfg = make_crane_config(settings)
    params = make_solver_params(settings)
    problem, layout = build_tocp(cfg)
    w0 = feasible_initialization(cfg, layout)
    lin = linearize(problem, w0)
    rows = []
    for radius in radii:
        lp = build_trust_region_lp(lin, problem, radius)
        sol = solve_lp(lp)
        _, trace = run_inner(problem, lin, w0, sol.primal, radius,
                             params.inner, start_basis=sol.basis)
        rows.extend(_inner_rows([radius], trace))
        print(f"inner-study radius={radius:g}: {trace.status.value} "
              f"after {trace.plp_solves} subproblem solves")
    write_csv(os.path.join(out_dir, "inner_study.csv"),
              ["radius", "inner_l", "h", "ratio", "kappa", "status"], rows)
    return EXIT_OK


def _bench_worker(args):
    index, cfg, params = args
    try:
        problem, layout = build_tocp(cfg)
        counter = CountingFunction(problem.g)
        problem = replace(problem, g=counter)
        w0 = feasible_initialization(cfg, layout)
        result = solve(problem, w0, params)
        zs = first_zero_slack_iteration(result, layout)
        return [index, len(result.history), counter.calls,
                zs, layout.horizon(result.final_point), result.status.value]
    except (InitializationError, InfeasibleStartError) as exc:
        return [index, 0, 0, None, None, f"error_init:{type(exc).__name__}"]
    except Exception as exc:  # noqa: BLE001 - per-instance failures are data
        return [index, 0, 0, None, None, f"error:{type(exc).__name__}"]


def run_bench(config_path: Optional[str], seed: int, out_dir: str,
              overrides=None, count: int = 100, radius: float = 0.05,
              jobs: int = 1) -> int:
    settings = gather_settings(config_path, overrides or {})
    cfg = make_crane_config(settings)
    params = make_solver_params(settings)
    try:
        instances = perturb_problems(cfg, seed=seed, count=count, radius=radius)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    work = [(i, inst, params) for i, inst in enumerate(instances)]
    if jobs > 1:
        with Pool(processes=jobs) as pool:
            rows = pool.map(_bench_worker, work)
    else:
        rows = [_bench_worker(item) for item in work]
    rows.sort(key=lambda r: r[0])
    write_csv(os.path.join(out_dir, "bench_summary.csv"),
              ["instance", "outer_iterations", "constraint_evaluations",
               "iterations_to_zero_slack", "final_objective", "status"], rows)
    n_fail = sum(1 for r in rows if r[5] != SolveStatus.OPTIMAL.value)
    print(f"bench: {len(rows)} instances, {n_fail} not optimal")
    return EXIT_SOLVER if n_fail > 0.10 * len(rows) else EXIT_OK


# -- argument parsing ---------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fslp", description="Feasible sequential linear programming runs")
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(sp):
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="parameter override (repeatable)")

    sp = sub.add_parser("illustrative", help="two-variable parametric problem")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--start", default="2,10",
                    help="starting point 'w1,w2' (default 2,10)")
    common(sp)

    sp = sub.add_parser("crane", help="default crane run")
    sp.add_argument("--config", default=None)
    common(sp)

    sp = sub.add_parser("inner-study", help="feasibility iterations per radius")
    sp.add_argument("--config", default=None)
    sp.add_argument("--radii", default="1,0.5,0.25,0.125,0.0625",
                    help="comma-separated descending radii")
    common(sp)

    sp = sub.add_parser("bench", help="perturbed-instance sweep")
    sp.add_argument("--config", default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--radius", type=float, default=0.05)
    common(sp)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        manifest = RunManifest(
            experiment=args.experiment,
            config_path=getattr(args, "config", None),
            out_dir=args.out,
            seed=getattr(args, "seed", 0),
            overrides=parse_overrides(args.set),
        )
        if manifest.experiment == "illustrative":
            start = tuple(_parse_floats(args.start, 2, "--start"))
            return run_illustrative(args.eps, manifest.out_dir,
                                    manifest.overrides, start=start)
        if manifest.experiment == "crane":
            return run_crane(manifest.config_path, manifest.out_dir,
                             manifest.overrides)
        if manifest.experiment == "inner-study":
            radii = _parse_floats(args.radii, None, "--radii")
            return run_inner_study(manifest.config_path, radii,
                                   manifest.out_dir, manifest.overrides)
        if manifest.experiment == "bench":
            return run_bench(manifest.config_path, manifest.seed,
                             manifest.out_dir, manifest.overrides,
                             count=args.count, radius=args.radius,
                             jobs=args.jobs)
        raise ConfigError(f"unknown experiment {manifest.experiment}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InitializationError, InfeasibleStartError) as exc:
        print(f"initialization infeasible: {exc}", file=sys.stderr)
        return EXIT_INIT


if __name__ == "__main__":
    sys.exit(main())
