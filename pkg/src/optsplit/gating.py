"""Option models under gating execution.

Under gating execution the policy over options reselects an option at every
step, so a set of Markov options together with ``mu`` collapses onto
state-indexed matrices: the marginal policy ``sigma``, the continuation
matrix ``p_sharp``, the termination matrix ``p_bot``, and the closed-form
reward and transition models

    b = (I - gamma p_sharp)^-1 r_sigma
    F = (I - gamma p_sharp)^-1 (gamma p_bot)

whose operator ``v -> b + F v`` is the multi-step backup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._linalg import LUFactor
from .errors import DimensionError
from .mdp import (
    Mdp,
    PolicyMatrix,
    _readonly,
    _row_stochastic_violations,
    check_policy_shape,
    mix_transitions,
)


@dataclass(frozen=True, eq=False)
class OptionSpec:
    """A Markov option available in every state.

    ``termination[s]`` is the probability of terminating on arrival in ``s``.
    """

    policy: PolicyMatrix
    termination: np.ndarray

    def __post_init__(self):
        beta = _readonly(self.termination, 1, "termination")
        if beta.size != self.policy.n_states:
            raise DimensionError(
                f"termination has {beta.size} entries, policy has {self.policy.n_states} states"
            )
        if not np.all((beta >= 0.0) & (beta <= 1.0)):
            raise ValueError("termination probabilities must lie in [0, 1]")
        object.__setattr__(self, "termination", beta)

    def with_termination(self, termination) -> OptionSpec:
        return OptionSpec(self.policy, termination)


@dataclass(frozen=True, eq=False)
class MetaPolicy:
    """Policy over options, ``probs[s, w] = mu(w | s)``."""

    probs: np.ndarray

    def __post_init__(self):
        probs = _readonly(self.probs, 2, "mu")
        problems = list(_row_stochastic_violations(probs, "mu"))
        if problems:
            raise ValueError("mu is not row-stochastic: " + "; ".join(problems[:5]))
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n_states: int, n_options: int) -> MetaPolicy:
        return cls(np.full((n_states, n_options), 1.0 / n_options))


@dataclass(frozen=True, eq=False)
class GatingModels:
    sigma: PolicyMatrix
    p_sharp: np.ndarray
    p_bot: np.ndarray
    b: np.ndarray
    f: np.ndarray
    gamma: float
    # LU of I - gamma p_sharp, shared by b, F and the Richardson form.
    factor: LUFactor = field(repr=False, compare=False)

    @property
    def n_states(self) -> int:
        return self.p_sharp.shape[0]


def scale_terminations(options: Sequence[OptionSpec], c: float) -> list[OptionSpec]:
    """Return options with every termination profile multiplied by ``c`` in [0, 1]."""
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"termination scale must lie in [0, 1], got {c}")
    return [w.with_termination(c * w.termination) for w in options]


def _check_option_set(options: Sequence[OptionSpec], mu: MetaPolicy, mdp: Mdp | None = None):
    if len(options) == 0:
        raise ValueError("need at least one option")
    if mu.probs.shape[1] != len(options):
        raise DimensionError(
            f"mu option axis has {mu.probs.shape[1]} entries, got {len(options)} options"
        )
    n = mu.probs.shape[0] if mdp is None else mdp.n_states
    if mu.probs.shape[0] != n:
        raise DimensionError(f"mu state axis has {mu.probs.shape[0]} entries, expected {n}")
    k = options[0].policy.n_actions
    for i, w in enumerate(options):
        if mdp is not None:
            check_policy_shape(mdp, w.policy, what=f"option {i} policy")
        elif w.policy.n_states != n or w.policy.n_actions != k:
            raise DimensionError(
                f"option {i} policy has shape {w.policy.probs.shape}, expected {(n, k)}"
            )


def marginal_policy(options: Sequence[OptionSpec], mu: MetaPolicy) -> PolicyMatrix:
    """sigma(a|s) = sum_w mu(w|s) pi_w(a|s)."""
    _check_option_set(options, mu)
    sigma = np.zeros_like(options[0].policy.probs)
    for i, w in enumerate(options):
        sigma = sigma + mu.probs[:, i, None] * w.policy.probs
    return PolicyMatrix(sigma)


def _gated_weights(options, mu, continuing):
    # weights[s, a, s2] = sum_w mu(w|s) pi_w(a|s) g_w(s2) with g = 1 - beta or beta.
    # Accumulated in the same order as marginal_policy: with g == 1 the
    # weights equal sigma bitwise.
    n, k = options[0].policy.probs.shape
    weights = np.zeros((n, k, n))
    for i, w in enumerate(options):
        gate = 1.0 - w.termination if continuing else w.termination
        weights = weights + (mu.probs[:, i, None] * w.policy.probs)[:, :, None] * gate
    return weights


def continuation_matrix(mdp: Mdp, options: Sequence[OptionSpec], mu: MetaPolicy) -> np.ndarray:
    """P_sharp(s, s2): probability of moving to ``s2`` without terminating there."""
    _check_option_set(options, mu, mdp)
    return mix_transitions(_gated_weights(options, mu, True), mdp.transition)


def termination_matrix(mdp: Mdp, options: Sequence[OptionSpec], mu: MetaPolicy) -> np.ndarray:
    """P_bot(s, s2): probability of moving to ``s2`` and terminating there."""
    _check_option_set(options, mu, mdp)
    return mix_transitions(_gated_weights(options, mu, False), mdp.transition)


def _preconditioner(mdp, p_sharp):
    return LUFactor(np.eye(mdp.n_states) - mdp.gamma * p_sharp, label="I - gamma P_sharp")


def reward_model(mdp: Mdp, options: Sequence[OptionSpec], mu: MetaPolicy) -> np.ndarray:
    """Expected discounted reward collected until termination, per start state."""
    return build_gating_models(mdp, options, mu).b


def transition_model(mdp: Mdp, options: Sequence[OptionSpec], mu: MetaPolicy) -> np.ndarray:
    """Discounted distribution of the state in which termination occurs."""
    return build_gating_models(mdp, options, mu).f


def build_gating_models(mdp: Mdp, options: Sequence[OptionSpec], mu: MetaPolicy) -> GatingModels:
    """Compute sigma, P_sharp, P_bot, b and F from one set of inputs.

    ``I - gamma P_sharp`` is factorized once; ``b`` and the ``n`` columns of
    ``F`` are back-substitutions against the same factor.
    """
    sigma = marginal_policy(options, mu)
    p_sharp = continuation_matrix(mdp, options, mu)
    p_bot = termination_matrix(mdp, options, mu)
    r_sigma = (sigma.probs * mdp.reward).sum(axis=1)
    factor = _preconditioner(mdp, p_sharp)
    b = factor.solve(r_sigma)
    f = factor.solve(mdp.gamma * p_bot)
    for array in (p_sharp, p_bot, b, f):
        array.setflags(write=False)
    return GatingModels(sigma, p_sharp, p_bot, b, f, mdp.gamma, factor)


def gating_violations(models: GatingModels, mdp: Mdp, tol: float = 1e-9) -> list[str]:
    """Check the structural invariants of ``models`` by substitution.

    Returns human-readable messages; an empty list means every check passed.
    """
    out = []
    gamma = models.gamma
    if np.any(models.p_sharp < 0) or np.any(models.p_bot < 0):
        out.append("continuation or termination matrix has negative entries")
    rows = (models.p_sharp + models.p_bot).sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > 1e-10:
        out.append(f"P_sharp + P_bot rows deviate from 1 by {np.max(np.abs(rows - 1.0)):.3g}")
    r_sigma = (models.sigma.probs * mdp.reward).sum(axis=1)
    b_res = np.max(np.abs(models.b - (r_sigma + gamma * models.p_sharp @ models.b)))
    if b_res >= tol:
        out.append(f"reward model recursion residual {b_res:.3g}")
    f_res = np.max(
        np.abs(models.f - (gamma * models.p_bot + gamma * models.p_sharp @ models.f)),
        initial=0.0,
    )
    if f_res >= tol:
        out.append(f"transition model recursion residual {f_res:.3g}")
    return out
