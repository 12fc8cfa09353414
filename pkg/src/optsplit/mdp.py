"""Finite discounted MDPs, stationary policies and the chains they induce."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

PROB_TOL = 1e-12

#: Largest size handled by the dense eigenvalue routine in `spectral_radius`.
DENSE_EIG_MAX = 256


def _readonly(array, ndim, name):
    array = np.array(array, dtype=float)
    if array.ndim != ndim:
        raise DimensionError(f"{name} must have {ndim} axes, got shape {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Mdp:
    """A finite discounted MDP.

    Only shapes are enforced at construction; probabilistic invariants are
    reported by `validate_mdp` so that malformed inputs can be diagnosed.

    Parameters
    ----------
    transition : array_like, shape (S, A, S)
        ``transition[s, a, s2]`` is P(s2 | s, a).
    reward : array_like, shape (S, A)
        Expected immediate reward r(s, a).
    gamma : float
        Discount factor.
    """

    transition: np.ndarray
    reward: np.ndarray
    gamma: float

    def __post_init__(self):
        transition = _readonly(self.transition, 3, "transition")
        reward = _readonly(self.reward, 2, "reward")
        n, k, n2 = transition.shape
        if n == 0 or k == 0:
            raise DimensionError("an MDP needs at least one state and one action")
        if n2 != n:
            raise DimensionError(
                f"transition successor axis has {n2} entries, expected {n} states"
            )
        if reward.shape != (n, k):
            raise DimensionError(
                f"reward has shape {reward.shape}, expected (n_states, n_actions) = {(n, k)}"
            )
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "reward", reward)
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[1]

    def to_dict(self) -> dict:
        return {
            "n_states": self.n_states,
            "n_actions": self.n_actions,
            "gamma": self.gamma,
            "transition": self.transition.tolist(),
            "reward": self.reward.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Mdp:
        mdp = cls(np.asarray(data["transition"], dtype=float),
                  np.asarray(data["reward"], dtype=float), data["gamma"])
        for key, actual in (("n_states", mdp.n_states), ("n_actions", mdp.n_actions)):
            if key in data and int(data[key]) != actual:
                raise DimensionError(f"{key} = {data[key]} but arrays imply {actual}")
        return mdp


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _row_stochastic_violations(table, name):
    """Yield messages for negative entries and rows (last axis) not summing to one."""
    for idx in np.argwhere(table < 0):
        idx = tuple(int(i) for i in idx)
        yield f"{name} entry ({','.join(map(str, idx))}) is negative ({table[idx]:.12g})"
    sums = table.sum(axis=-1)
    for idx in np.argwhere(~(np.abs(sums - 1.0) <= PROB_TOL)):
        idx = tuple(int(i) for i in idx)
        yield f"row ({','.join(map(str, idx))}) sums to {sums[idx]:.12g}"


def validate_mdp(mdp: Mdp) -> ValidationResult:
    """Collect every violated MDP invariant, never raising."""
    violations = []
    if not np.all(np.isfinite(mdp.transition)):
        violations.append("transition has non-finite entries")
    if not np.all(np.isfinite(mdp.reward)):
        violations.append("reward has non-finite entries")
    violations.extend(_row_stochastic_violations(mdp.transition, "transition"))
    if not mdp.gamma < 1.0:
        violations.append("gamma must be < 1")
    if not mdp.gamma >= 0.0:
        violations.append("gamma must be >= 0")
    return ValidationResult(tuple(violations))


def require_valid(mdp: Mdp) -> Mdp:
    """Return ``mdp`` unchanged, or raise ValueError listing its violations."""
    result = validate_mdp(mdp)
    if not result.ok:
        raise ValueError("invalid MDP: " + "; ".join(result.violations))
    return mdp


@dataclass(frozen=True, eq=False)
class PolicyMatrix:
    """Stationary stochastic policy, ``probs[s, a] = pi(a | s)``."""

    probs: np.ndarray

    def __post_init__(self):
        probs = _readonly(self.probs, 2, "policy")
        problems = list(_row_stochastic_violations(probs, "policy"))
        if problems:
            raise ValueError("policy is not row-stochastic: " + "; ".join(problems[:5]))
        object.__setattr__(self, "probs", probs)

    @property
    def n_states(self) -> int:
        return self.probs.shape[0]

    @property
    def n_actions(self) -> int:
        return self.probs.shape[1]

    @classmethod
    def uniform(cls, n_states: int, n_actions: int) -> PolicyMatrix:
        return cls(np.full((n_states, n_actions), 1.0 / n_actions))

    @classmethod
    def deterministic(cls, actions, n_actions: int) -> PolicyMatrix:
        actions = np.asarray(actions, dtype=int)
        probs = np.zeros((actions.size, n_actions))
        probs[np.arange(actions.size), actions] = 1.0
        return cls(probs)


@dataclass(frozen=True, eq=False)
class InducedChain:
    """Markov chain ``p_pi`` and expected reward ``r_pi`` under a fixed policy."""

    p_pi: np.ndarray
    r_pi: np.ndarray


def check_policy_shape(mdp: Mdp, policy: PolicyMatrix, what="policy"):
    if policy.n_states != mdp.n_states:
        raise DimensionError(
            f"{what} state axis has {policy.n_states} entries, MDP has {mdp.n_states} states"
        )
    if policy.n_actions != mdp.n_actions:
        raise DimensionError(
            f"{what} action axis has {policy.n_actions} entries, MDP has {mdp.n_actions} actions"
        )


def mix_transitions(weights, transition):
    """Sum ``weights * transition`` over the action axis.

    ``weights`` is either (S, A) or (S, A, S); every chain matrix in the
    package goes through this one reduction so that equal weights give
    bitwise-equal matrices.
    """
    if weights.ndim == 2:
        weights = weights[:, :, None]
    return (weights * transition).sum(axis=1)


def induce_chain(mdp: Mdp, policy: PolicyMatrix) -> InducedChain:
    check_policy_shape(mdp, policy)
    p_pi = mix_transitions(policy.probs, mdp.transition)
    r_pi = (policy.probs * mdp.reward).sum(axis=1)
    p_pi.setflags(write=False)
    r_pi.setflags(write=False)
    return InducedChain(p_pi, r_pi)


def _perron_root(nonneg, max_iters, tol=1e-10, seed=0):
    # The unit shift keeps the iteration well posed for periodic chains:
    # rho(B + I) = rho(B) + 1 for entrywise nonnegative B.
    n = nonneg.shape[0]
    shifted = nonneg + np.eye(n)
    x = np.random.default_rng(seed).uniform(0.5, 1.5, size=n)
    x /= np.linalg.norm(x)
    estimate = np.inf
    for _ in range(max_iters):
        y = shifted @ x
        new_estimate = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        if abs(new_estimate - estimate) < tol:
            estimate = new_estimate
            break
        estimate = new_estimate
    return max(estimate - 1.0, 0.0)


def spectral_radius(m, dense_max: int = DENSE_EIG_MAX) -> float:
    """Largest eigenvalue modulus of a square matrix.

    Matrices up to ``dense_max`` rows use a dense eigensolver. Larger ones
    use power iteration on the entrywise absolute value, which is exact for
    the nonnegative iteration matrices of regular splittings and an upper
    bound otherwise.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"spectral radius needs a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("spectral radius needs finite entries")
    n = m.shape[0]
    if n == 0:
        return 0.0
    if n <= dense_max:
        return float(np.abs(np.linalg.eigvals(m)).max())
    return _perron_root(np.abs(m), max_iters=100 * n)
