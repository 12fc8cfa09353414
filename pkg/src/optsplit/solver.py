"""Policy-evaluation solvers driven by a matrix splitting."""

from __future__ import annotations

from dataclasses import dataclass, field
from time import perf_counter

import numpy as np

from ._linalg import LUFactor
from .errors import DimensionError, InsufficientHistoryError
from .gating import GatingModels
from .mdp import Mdp, PolicyMatrix, induce_chain
from .splitting import Splitting, policy_matrix_a

RATE_WINDOW = 20
MIN_HISTORY = 25
DIVERGENCE_FACTOR = 1e12


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-10
    max_iters: int = 100_000
    v0: np.ndarray | None = None
    keep_iterates: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")


@dataclass
class SolveReport:
    """Outcome of a stationary iteration.

    ``residual_history[k]`` is ``||A v_k - r||_inf`` for ``k = 0..iterations``,
    so it always starts with the residual of the initial guess.
    """

    v: np.ndarray
    iterations: int
    residual_history: list[float]
    empirical_rate: float
    converged: bool
    diverged: bool = False
    factor_seconds: float = 0.0
    iterate_seconds: float = 0.0
    iterates: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1]

    @property
    def seconds_per_iteration(self) -> float:
        return self.iterate_seconds / self.iterations if self.iterations else 0.0


def direct_solve(mdp: Mdp, policy: PolicyMatrix) -> np.ndarray:
    """Exact value function of ``policy`` by dense LU."""
    chain = induce_chain(mdp, policy)
    a = np.eye(mdp.n_states) - mdp.gamma * chain.p_pi
    return LUFactor(a, label="I - gamma P_pi").solve(chain.r_pi)


def _tail_rate(residuals):
    """Geometric mean of the last RATE_WINDOW successive residual ratios."""
    tail = np.asarray(residuals[-(RATE_WINDOW + 1):], dtype=float)
    if tail.size < 2 or np.any(tail <= 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(tail[1:] / tail[:-1]))))


def iterate_splitting(s: Splitting, r, cfg: SolveConfig | None = None) -> SolveReport:
    """Run ``v_{k+1} = M^-1 (N v_k + r)`` until ``||A v - r||_inf <= tol``.

    M is factorized once per call. Running out of iterations or blowing up
    is reported through the returned flags rather than raised.
    """
    cfg = cfg or SolveConfig()
    r = np.asarray(r, dtype=float)
    n = s.size
    if r.shape != (n,):
        raise DimensionError(f"right-hand side has shape {r.shape}, expected ({n},)")
    v = np.zeros(n) if cfg.v0 is None else np.array(cfg.v0, dtype=float)
    if v.shape != (n,):
        raise DimensionError(f"initial guess has shape {v.shape}, expected ({n},)")

    factor = LUFactor(s.m, label=f"M of splitting {s.label!r}")
    residual = float(np.max(np.abs(s.a @ v - r)))
    history = [residual]
    iterates = [v.copy()] if cfg.keep_iterates else []
    limit = DIVERGENCE_FACTOR * max(residual, np.finfo(float).tiny)
    converged = residual <= cfg.tol
    diverged = False
    k = 0

    start = perf_counter()
    while not converged and k < cfg.max_iters:
        v = factor.solve(s.n_mat @ v + r)
        k += 1
        residual = float(np.max(np.abs(s.a @ v - r)))
        history.append(residual)
        if cfg.keep_iterates:
            iterates.append(v.copy())
        if residual <= cfg.tol:
            converged = True
        elif not np.isfinite(residual) or residual > limit:
            diverged = True
            break
    elapsed = perf_counter() - start

    return SolveReport(
        v=v,
        iterations=k,
        residual_history=history,
        empirical_rate=_tail_rate(history),
        converged=converged,
        diverged=diverged,
        factor_seconds=factor.seconds,
        iterate_seconds=elapsed,
        iterates=iterates,
    )


def apply_generalized_bellman(models: GatingModels, v) -> np.ndarray:
    """L v = b + F v."""
    v = np.asarray(v, dtype=float)
    if v.shape != (models.n_states,):
        raise DimensionError(f"v has shape {v.shape}, expected ({models.n_states},)")
    return models.b + models.f @ v


def richardson_step(models: GatingModels, mdp: Mdp, v) -> np.ndarray:
    """Preconditioned Richardson update ``v + M^-1 (r_sigma - A v)``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (models.n_states,) or mdp.n_states != models.n_states:
        raise DimensionError(
            f"v has shape {v.shape}, models cover {models.n_states} states, "
            f"MDP has {mdp.n_states}"
        )
    r_sigma = (models.sigma.probs * mdp.reward).sum(axis=1)
    a = policy_matrix_a(mdp, models.sigma)
    return v + models.factor.solve(r_sigma - a @ v)


def estimate_rate(report: SolveReport) -> float:
    """Empirical asymptotic rate from the tail of a residual history.

    Uses the last 20 successive ratios among residuals that are still above
    the round-off floor ``100 * eps * max(residual_history)``. Approaches the
    spectral radius of the iteration matrix as the run grows longer.
    """
    history = np.asarray(report.residual_history, dtype=float)
    floor = 100 * np.finfo(float).eps * history.max(initial=0.0)
    usable = history[history > floor]
    if usable.size < MIN_HISTORY:
        raise InsufficientHistoryError(
            f"insufficient history: {usable.size} usable residuals, need {MIN_HISTORY}"
        )
    tail = usable[-(RATE_WINDOW + 1):]
    return float(np.exp(np.mean(np.log(tail[1:] / tail[:-1]))))
