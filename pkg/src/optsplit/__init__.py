"""Options over finite MDPs as regular matrix splittings of I - gamma P_sigma."""

from .call_return import (
    OptionModels,
    option_models,
    option_recursion_residuals,
    option_reward_model,
    option_transition_model,
    splitting_identity,
)
from .errors import ComparisonError, DimensionError, InsufficientHistoryError, SingularMatrixError
from .gating import (
    GatingModels,
    MetaPolicy,
    OptionSpec,
    build_gating_models,
    continuation_matrix,
    marginal_policy,
    reward_model,
    scale_terminations,
    termination_matrix,
    transition_model,
)
from .mdp import InducedChain, Mdp, PolicyMatrix, induce_chain, spectral_radius, validate_mdp
from .solver import (
    SolveConfig,
    SolveReport,
    apply_generalized_bellman,
    direct_solve,
    estimate_rate,
    iterate_splitting,
    richardson_step,
)
from .splitting import (
    RegularityReport,
    Splitting,
    check_regular,
    classic_splitting,
    compare_rates,
    preconditioned_system,
    rate_bound,
    splitting_from_options,
)

__version__ = "0.1.0"
