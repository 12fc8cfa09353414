"""Per-option reward and transition models under call-and-return execution.

Conditioning on the running option restores the Markov property, so each
option on its own yields a splitting of ``I - gamma P_{pi_w}`` with
``M_w = I - gamma P_{w,sharp}`` and ``N_w = gamma P_{w,bot}``. Termination
is evaluated at the successor state in both matrices, which is what makes
them sum to ``P_{pi_w}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import LUFactor
from .gating import OptionSpec
from .mdp import Mdp, check_policy_shape, induce_chain
from .splitting import Splitting


@dataclass(frozen=True, eq=False)
class OptionModels:
    p_w_sharp: np.ndarray
    p_w_bot: np.ndarray
    b_w: np.ndarray
    f_w: np.ndarray
    r_w: np.ndarray


def option_models(mdp: Mdp, w: OptionSpec) -> OptionModels:
    check_policy_shape(mdp, w.policy, what="option policy")
    chain = induce_chain(mdp, w.policy)
    p_sharp = chain.p_pi * (1.0 - w.termination)[None, :]
    p_bot = chain.p_pi * w.termination[None, :]
    factor = LUFactor(np.eye(mdp.n_states) - mdp.gamma * p_sharp, label="I - gamma P_w_sharp")
    b_w = factor.solve(chain.r_pi)
    f_w = factor.solve(mdp.gamma * p_bot)
    return OptionModels(p_sharp, p_bot, b_w, f_w, np.array(chain.r_pi))


def option_reward_model(mdp: Mdp, w: OptionSpec) -> np.ndarray:
    return option_models(mdp, w).b_w


def option_transition_model(mdp: Mdp, w: OptionSpec) -> np.ndarray:
    return option_models(mdp, w).f_w


def splitting_identity(mdp: Mdp, w: OptionSpec) -> Splitting:
    """The splitting ``(I - gamma P_{pi_w}) = M_w - N_w`` induced by one option."""
    models = option_models(mdp, w)
    p_pi = induce_chain(mdp, w.policy).p_pi
    eye = np.eye(mdp.n_states)
    return Splitting(
        eye - mdp.gamma * p_pi,
        eye - mdp.gamma * models.p_w_sharp,
        mdp.gamma * models.p_w_bot,
        "call-return option",
    )


def option_recursion_residuals(mdp: Mdp, w: OptionSpec, models: OptionModels) -> tuple[float, float]:
    """Residuals of the one-step recursions for ``b_w`` and ``F_w``, written per action.

    The transition-model recursion is evaluated entrywise over successor
    states with the Kronecker delta made explicit, independently of the
    matrix form used to build ``models``.
    """
    pi, beta, gamma = w.policy.probs, w.termination, mdp.gamma
    p = mdp.transition
    # b_w(s) = sum_a pi(a|s) [r(s,a) + gamma sum_s2 P(s2|s,a) (1 - beta(s2)) b_w(s2)]
    cont_value = p @ ((1.0 - beta) * models.b_w)
    b_rhs = (pi * (mdp.reward + gamma * cont_value)).sum(axis=1)
    # F_w(s,s') = gamma sum_a pi(a|s) sum_sb P(sb|s,a) [beta(sb) delta(sb,s') + (1-beta(sb)) F_w(sb,s')]
    inner = np.diag(beta) + (1.0 - beta)[:, None] * models.f_w
    f_rhs = gamma * np.einsum("sa,sab,bt->st", pi, p, inner)
    return (float(np.max(np.abs(models.b_w - b_rhs))),
            float(np.max(np.abs(models.f_w - f_rhs))))
