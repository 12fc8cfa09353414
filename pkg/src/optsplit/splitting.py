"""Matrix splittings A = M - N of the policy-evaluation matrix I - gamma P_sigma.

A splitting induces the stationary iteration ``x <- M^-1 (N x + r)``; its
asymptotic rate is the spectral radius of ``M^-1 N``. Splittings come from
option sets (`splitting_from_options`) or from the textbook relaxation
schemes (`classic_splitting`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._linalg import LUFactor
from .errors import ComparisonError, DimensionError
from .gating import GatingModels
from .mdp import Mdp, PolicyMatrix, induce_chain, spectral_radius

SPLIT_TOL = 1e-12
NONNEG_TOL = -1e-10


@dataclass(frozen=True, eq=False)
class Splitting:
    a: np.ndarray
    m: np.ndarray
    n_mat: np.ndarray
    label: str

    def __post_init__(self):
        a, m, n_mat = (np.array(x, dtype=float) for x in (self.a, self.m, self.n_mat))
        if not (a.ndim == 2 and a.shape[0] == a.shape[1] and a.shape == m.shape == n_mat.shape):
            raise DimensionError(
                f"splitting {self.label!r}: A, M, N shapes {a.shape}, {m.shape}, {n_mat.shape}"
            )
        gap = np.max(np.abs(a - (m - n_mat)), initial=0.0)
        if not gap <= SPLIT_TOL:
            raise ValueError(f"splitting {self.label!r}: A - (M - N) is {gap:.3g}")
        for x in (a, m, n_mat):
            x.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n_mat", n_mat)
        # Both must be nonsingular; factorizing raises SingularMatrixError otherwise.
        LUFactor(a, label=f"A of splitting {self.label!r}")
        object.__setattr__(self, "_m_factor", LUFactor(m, label=f"M of splitting {self.label!r}"))

    @property
    def size(self) -> int:
        return self.a.shape[0]

    @property
    def m_factor(self) -> LUFactor:
        return self._m_factor

    @cached_property
    def iteration_matrix(self) -> np.ndarray:
        """M^-1 N."""
        g = self.m_factor.solve(self.n_mat)
        g.setflags(write=False)
        return g


@dataclass(frozen=True)
class RegularityReport:
    m_inverse_nonneg: bool
    m_inverse_min: float
    m_inverse_argmin: tuple[int, int]
    n_nonneg: bool
    n_min: float
    n_argmin: tuple[int, int]
    rho: float
    is_regular: bool


@dataclass(frozen=True)
class RateComparison:
    rho_coarse: float
    rho_fine: float
    n_dominated: bool
    max_n_excess: float
    ordered: bool


def policy_matrix_a(mdp: Mdp, policy: PolicyMatrix) -> np.ndarray:
    p = induce_chain(mdp, policy).p_pi
    return np.eye(mdp.n_states) - mdp.gamma * p


def splitting_from_options(models: GatingModels, mdp: Mdp) -> Splitting:
    """M = I - gamma P_sharp, N = gamma P_bot."""
    if models.n_states != mdp.n_states:
        raise DimensionError(
            f"models cover {models.n_states} states, MDP has {mdp.n_states}"
        )
    eye = np.eye(mdp.n_states)
    a = policy_matrix_a(mdp, models.sigma)
    m = eye - mdp.gamma * models.p_sharp
    n_mat = mdp.gamma * models.p_bot
    return Splitting(a, m, n_mat, "options")


_METHOD_RE = re.compile(r"^\s*([a-z_\-]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")
_ALIASES = {"gauss-seidel": "gauss_seidel", "gs": "gauss_seidel"}


def parse_method(name: str) -> tuple[str, float | None]:
    """Split ``"sor(1.5)"`` into ``("sor", 1.5)``; bare names give ``None``."""
    match = _METHOD_RE.match(name.lower())
    if match is None:
        raise ValueError(f"cannot parse method {name!r}")
    kind = _ALIASES.get(match.group(1), match.group(1))
    param = match.group(2)
    return kind, (float(param) if param not in (None, "") else None)


def classic_splitting(mdp: Mdp, policy: PolicyMatrix, method: str,
                      omega: float | None = None, tau: float | None = None) -> Splitting:
    """Jacobi, Gauss-Seidel, SOR or Richardson splitting of ``I - gamma P_pi``.

    ``method`` may carry its parameter inline, as in ``"sor(1.2)"`` or
    ``"richardson(0.5)"``.
    """
    kind, param = parse_method(method)
    p = induce_chain(mdp, policy).p_pi
    n = mdp.n_states
    eye = np.eye(n)
    a = eye - mdp.gamma * p
    if kind == "jacobi":
        m, label = np.diag(np.diag(a)), "jacobi"
    elif kind == "gauss_seidel":
        m, label = np.tril(a), "gauss-seidel"
    elif kind == "sor":
        omega = param if omega is None else omega
        if omega is None or not 0.0 < omega < 2.0:
            raise ValueError(f"SOR needs 0 < omega < 2, got {omega}")
        m, label = np.diag(np.diag(a)) / omega + np.tril(a, -1), f"sor({omega:g})"
    elif kind == "richardson":
        tau = (1.0 if param is None else param) if tau is None else tau
        if not tau > 0.0:
            raise ValueError(f"Richardson needs tau > 0, got {tau}")
        m, label = eye / tau, f"richardson({tau:g})"
    else:
        raise ValueError(f"unknown splitting method {method!r}")
    # N = M - A written as (M - I) + gamma P, so that M = I gives N = gamma P exactly.
    n_mat = (m - eye) + mdp.gamma * p
    return Splitting(a, m, n_mat, label)


def check_regular(s: Splitting) -> RegularityReport:
    """Certify M^-1 >= 0 and N >= 0 by forming M^-1 explicitly."""
    m_inv = s.m_factor.inverse()
    mi = np.unravel_index(np.argmin(m_inv), m_inv.shape)
    ni = np.unravel_index(np.argmin(s.n_mat), s.n_mat.shape)
    m_min, n_min = float(m_inv[mi]), float(s.n_mat[ni])
    m_ok, n_ok = m_min >= NONNEG_TOL, n_min >= NONNEG_TOL
    return RegularityReport(
        m_inverse_nonneg=m_ok,
        m_inverse_min=m_min,
        m_inverse_argmin=(int(mi[0]), int(mi[1])),
        n_nonneg=n_ok,
        n_min=n_min,
        n_argmin=(int(ni[0]), int(ni[1])),
        rho=spectral_radius(s.iteration_matrix),
        is_regular=m_ok and n_ok,
    )


def preconditioned_system(s: Splitting, r) -> tuple[np.ndarray, np.ndarray]:
    """Return (M^-1 A, M^-1 r), which has the same solution as A v = r."""
    r = np.asarray(r, dtype=float)
    if r.shape != (s.size,):
        raise DimensionError(f"right-hand side has shape {r.shape}, expected ({s.size},)")
    return s.m_factor.solve(s.a), s.m_factor.solve(r)


def rate_bound(s: Splitting) -> tuple[float, float]:
    """Spectral radius of M^-1 N and the bound ||I - M^-1 A||_inf."""
    rho = spectral_radius(s.iteration_matrix)
    bound = float(np.linalg.norm(np.eye(s.size) - s.m_factor.solve(s.a), ord=np.inf))
    return rho, bound


def compare_rates(coarse: Splitting, fine: Splitting, tol: float = 1e-9) -> RateComparison:
    """Compare two regular splittings of the same A whose N matrices are ordered.

    The ordering N_fine <= N_coarse is checked, not assumed; pairs that do
    not satisfy it are rejected. ``ordered`` records whether the resulting
    radii obey rho_fine <= rho_coarse + tol.
    """
    if coarse.a.shape != fine.a.shape or np.max(np.abs(coarse.a - fine.a)) > 1e-10:
        raise ComparisonError("splittings solve different systems")
    excess = float(np.max(fine.n_mat - coarse.n_mat))
    if excess > SPLIT_TOL:
        raise ComparisonError(
            f"comparison hypothesis not met: N_fine exceeds N_coarse by {excess:.3g}"
        )
    rho_c = spectral_radius(coarse.iteration_matrix)
    rho_f = spectral_radius(fine.iteration_matrix)
    return RateComparison(rho_c, rho_f, True, excess, rho_f <= rho_c + tol)
