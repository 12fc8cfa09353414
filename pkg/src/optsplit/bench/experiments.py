"""Termination-scale sweeps and method comparisons, written as CSV."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from time import perf_counter

import numpy as np

from ..gating import build_gating_models, marginal_policy, scale_terminations
from ..mdp import PolicyMatrix
from ..solver import SolveConfig, direct_solve, iterate_splitting
from ..splitting import classic_splitting, parse_method, rate_bound, splitting_from_options
from .generators import (
    gen_four_rooms,
    gen_random_mdp,
    gen_random_options,
    scalar_problem,
    two_state_chain,
)
from .problem_io import Problem, load_problem

SWEEP_COLUMNS = ("c", "rho", "norm_bound", "iterations", "factor_ms", "iter_ms", "final_residual")
TIMING_COLUMNS = ("factor_ms", "iter_ms")
COMPARE_COLUMNS = ("method", "rho", "norm_bound", "iterations", "final_residual", "wall_ms",
                   "converged", "diverged", "oracle_error", "agrees")
MONOTONE_TOL = 1e-9


@dataclass
class ExperimentSpec:
    """What to sweep and where to write it.

    ``problem`` is either ``{"path": ..., "options_path": ...}`` or a
    generator description such as ``{"generator": "random", "n": 16,
    "k": 4, "gamma": 0.9, "seed": 0, "sparsity": 1.0, "n_options": 3}``.
    """

    problem: dict
    beta_grid: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    tol: float = 1e-10
    max_iters: int = 100_000
    output: str | None = None

    def __post_init__(self):
        if not self.beta_grid:
            raise ValueError("beta_grid must not be empty")
        if any(not 0.0 <= c <= 1.0 for c in self.beta_grid):
            raise ValueError(f"beta_grid values must lie in [0, 1], got {self.beta_grid}")

    @classmethod
    def from_json(cls, path) -> ExperimentSpec:
        data = json.loads(Path(path).read_text())
        return cls(**data)


@dataclass(frozen=True)
class SweepRow:
    c: float
    rho: float
    norm_bound: float
    iterations: int
    factor_ms: float
    iter_ms: float
    final_residual: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    failures: list[str]

    @property
    def status(self) -> str:
        return "FAILED" if self.failures else "OK"


def resolve_problem(problem: dict) -> Problem:
    if "path" in problem:
        return load_problem(problem["path"], problem.get("options_path"))
    name = problem.get("generator", "random")
    gamma = float(problem.get("gamma", 0.9))
    if name == "random":
        seed = int(problem.get("seed", 0))
        mdp = gen_random_mdp(int(problem.get("n", 16)), int(problem.get("k", 4)), gamma,
                             seed, float(problem.get("sparsity", 1.0)))
        options, mu = gen_random_options(mdp, int(problem.get("n_options", 3)), seed + 1)
        return Problem(mdp, options, mu)
    if name in ("four_rooms", "four-rooms"):
        return Problem(*gen_four_rooms(gamma))
    if name == "scalar":
        return Problem(*scalar_problem(gamma, float(problem.get("reward", 1.0))))
    if name in ("two_state", "two-state"):
        return Problem(*two_state_chain(gamma))
    raise ValueError(f"unknown generator {name!r}")


def _require_options(problem: Problem):
    if not problem.has_options:
        raise ValueError("this experiment needs an option set (keys 'options' and 'mu')")


def run_beta_sweep(spec: ExperimentSpec, problem: Problem | None = None) -> SweepResult:
    """Scale one base termination profile by each ``c`` and solve.

    Because every row uses ``c * beta`` for the same ``beta``, the N
    matrices are entrywise ordered along the grid and the spectral radius
    should not decrease with ``c``. Violations are collected as findings.
    """
    problem = problem or resolve_problem(spec.problem)
    _require_options(problem)
    mdp = problem.mdp
    cfg = SolveConfig(tol=spec.tol, max_iters=spec.max_iters)
    rows, failures = [], []
    for c in sorted(float(c) for c in spec.beta_grid):
        models = build_gating_models(mdp, scale_terminations(problem.options, c), problem.mu)
        s = splitting_from_options(models, mdp)
        rho, bound = rate_bound(s)
        r_sigma = (models.sigma.probs * mdp.reward).sum(axis=1)
        report = iterate_splitting(s, r_sigma, cfg)
        rows.append(SweepRow(
            c=c, rho=rho, norm_bound=bound, iterations=report.iterations,
            factor_ms=report.factor_seconds * 1e3,
            iter_ms=report.seconds_per_iteration * 1e3,
            final_residual=report.final_residual,
        ))
        if not rho < 1.0:
            failures.append(f"c={c}: spectral radius {rho!r} is not below 1")
        if not report.converged:
            failures.append(f"c={c}: did not converge in {report.iterations} iterations")
    for prev, row in zip(rows, rows[1:]):
        if row.rho < prev.rho - MONOTONE_TOL:
            failures.append(
                f"spectral radius decreases from {prev.rho!r} at c={prev.c} "
                f"to {row.rho!r} at c={row.c}"
            )
    result = SweepResult(rows, failures)
    if spec.output:
        write_csv(spec.output, SWEEP_COLUMNS, [asdict(r) for r in rows])
    return result


@dataclass(frozen=True)
class MethodRow:
    method: str
    rho: float
    norm_bound: float
    iterations: int
    final_residual: float
    wall_ms: float
    converged: bool
    diverged: bool
    oracle_error: float
    agrees: bool


def target_policy(problem: Problem) -> PolicyMatrix:
    """sigma of the option set, or the uniform policy when there is none."""
    if problem.has_options:
        return marginal_policy(problem.options, problem.mu)
    return PolicyMatrix.uniform(problem.mdp.n_states, problem.mdp.n_actions)


def build_splitting(problem: Problem, method: str):
    """Return the splitting named by ``method``; ``options(c)`` scales terminations by c."""
    kind, param = parse_method(method)
    mdp = problem.mdp
    if kind == "options":
        _require_options(problem)
        c = 1.0 if param is None else param
        models = build_gating_models(mdp, scale_terminations(problem.options, c), problem.mu)
        return splitting_from_options(models, mdp)
    return classic_splitting(mdp, target_policy(problem), method)


def run_method_comparison(problem: Problem, methods, tol: float = 1e-10,
                          max_iters: int = 100_000, output=None) -> list[MethodRow]:
    mdp = problem.mdp
    policy = target_policy(problem)
    oracle = direct_solve(mdp, policy)
    r = (policy.probs * mdp.reward).sum(axis=1)
    cfg = SolveConfig(tol=tol, max_iters=max_iters)
    rows = []
    for method in methods:
        start = perf_counter()
        s = build_splitting(problem, method)
        rho, bound = rate_bound(s)
        report = iterate_splitting(s, r, cfg)
        wall = perf_counter() - start
        err = float(np.max(np.abs(report.v - oracle)))
        rows.append(MethodRow(
            method=method, rho=rho, norm_bound=bound, iterations=report.iterations,
            final_residual=report.final_residual, wall_ms=wall * 1e3,
            converged=report.converged, diverged=report.diverged,
            oracle_error=err, agrees=report.converged and err <= 10 * tol,
        ))
    if output:
        write_csv(output, COMPARE_COLUMNS, [asdict(row) for row in rows])
    return rows


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, columns, records) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for rec in records:
                writer.writerow([_cell(rec[c]) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
