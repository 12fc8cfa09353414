"""Run every structural invariant against one problem instance."""

from __future__ import annotations

import numpy as np

from ..call_return import option_models, option_recursion_residuals, splitting_identity
from ..gating import build_gating_models, gating_violations, scale_terminations
from ..mdp import validate_mdp
from ..solver import (
    SolveConfig,
    apply_generalized_bellman,
    direct_solve,
    iterate_splitting,
    richardson_step,
)
from ..splitting import check_regular, rate_bound, splitting_from_options
from .problem_io import Problem

SCALES = (0.0, 0.25, 0.5, 0.75, 1.0)


def validate_problem(problem: Problem, tol: float = 1e-10, max_iters: int = 100_000,
                     n_starts: int = 10, seed: int = 0) -> list[str]:
    """Return a list of failed checks; empty means the instance passed."""
    failures = list(validate_mdp(problem.mdp).violations)
    if failures or not problem.has_options:
        if not problem.has_options:
            failures.append("problem has no option set to validate")
        return failures

    mdp, options, mu = problem.mdp, problem.options, problem.mu
    models = build_gating_models(mdp, options, mu)
    failures += gating_violations(models, mdp)

    s = splitting_from_options(models, mdp)
    report = check_regular(s)
    if not report.is_regular:
        failures.append(
            f"options splitting not regular: min M^-1 {report.m_inverse_min:.3g}, "
            f"min N {report.n_min:.3g}"
        )
    if not report.rho < 1.0:
        failures.append(f"spectral radius {report.rho!r} is not below 1")
    rho, bound = rate_bound(s)
    if rho > bound + 1e-10:
        failures.append(f"spectral radius {rho!r} exceeds norm bound {bound!r}")

    oracle = direct_solve(mdp, models.sigma)
    r_sigma = (models.sigma.probs * mdp.reward).sum(axis=1)
    rng = np.random.default_rng(seed)
    scale = 1.0 + float(np.max(np.abs(oracle)))
    limits = []
    for i in range(n_starts):
        v0 = None if i == 0 else rng.uniform(-scale, scale, size=mdp.n_states)
        run = iterate_splitting(s, r_sigma, SolveConfig(tol, max_iters, v0))
        if not run.converged:
            failures.append(f"start {i}: no convergence after {run.iterations} iterations")
        limits.append(run.v)
    err = float(np.max(np.abs(limits[0] - oracle)))
    if err > 1e-8:
        failures.append(f"options iteration misses the exact value function by {err:.3g}")

    v = rng.uniform(-scale, scale, size=mdp.n_states)
    gap = float(np.max(np.abs(richardson_step(models, mdp, v) - apply_generalized_bellman(models, v))))
    if gap > 1e-10:
        failures.append(f"Richardson and generalized Bellman forms differ by {gap:.3g}")

    radii = []
    for c in SCALES:
        scaled = build_gating_models(mdp, scale_terminations(options, c), mu)
        radii.append(rate_bound(splitting_from_options(scaled, mdp))[0])
    if any(b < a - 1e-9 for a, b in zip(radii, radii[1:])):
        failures.append(f"spectral radius not monotone in termination scale: {radii}")

    for i, w in enumerate(options):
        sw = splitting_identity(mdp, w)
        if not check_regular(sw).is_regular:
            failures.append(f"option {i}: call-and-return splitting not regular")
        b_res, f_res = option_recursion_residuals(mdp, w, option_models(mdp, w))
        if max(b_res, f_res) >= 1e-9:
            failures.append(f"option {i}: model recursion residuals {b_res:.3g}, {f_res:.3g}")
    return failures
