"""Heavy-tailed stochastic multi-armed bandits.

Policies (Robust MOSS, MOSS, Robust UCB with truncated or Catoni estimates),
robust mean estimators, heavy-tailed reward environments, a deterministic
simulation harness, and closed-form regret-bound evaluators.
"""

from .bounds import (
    GapProfile,
    dist_dependent_bound,
    minimax_constant,
    minimax_lower_bound,
    minimax_upper_bound,
)
from .config import ExperimentConfig, load_config, parse_config
from .environments import (
    ArmModel,
    BoundedUniformNoise,
    GpdNoise,
    NoNoise,
    RngStream,
    gpd_cdf,
    gpd_quantile,
    moment_bound_check,
    sample_reward,
    sample_rewards,
)
from .errors import (
    ConfigError,
    HorizonExceededError,
    InvalidParamsError,
    MomentDivergenceError,
    NotEnoughSamplesError,
)
from .estimators import (
    SaturatedMeanEstimator,
    catoni_mean,
    sat,
    truncated_mean,
)
from .math_core import (
    ProblemParams,
    check_condition,
    conf_radius,
    gamma_fn,
    h_of,
    log_plus,
    phi,
    psi,
    saturation_point,
    validate_params,
)
from .policies import (
    POLICY_KINDS,
    make_policy,
    moss_index,
    robust_moss_index,
    robust_ucb_index,
)
from .simulator import (
    AggregateStats,
    RegretTrace,
    aggregate,
    recording_grid,
    run_batch,
    run_single,
)

__version__ = "0.1.0"

__all__ = [
    "ProblemParams",
    "check_condition",
    "validate_params",
    "psi",
    "log_plus",
    "phi",
    "conf_radius",
    "h_of",
    "saturation_point",
    "gamma_fn",
    "sat",
    "SaturatedMeanEstimator",
    "truncated_mean",
    "catoni_mean",
    "ArmModel",
    "GpdNoise",
    "NoNoise",
    "BoundedUniformNoise",
    "RngStream",
    "gpd_quantile",
    "gpd_cdf",
    "sample_reward",
    "sample_rewards",
    "moment_bound_check",
    "POLICY_KINDS",
    "make_policy",
    "robust_moss_index",
    "moss_index",
    "robust_ucb_index",
    "RegretTrace",
    "AggregateStats",
    "recording_grid",
    "run_single",
    "run_batch",
    "aggregate",
    "GapProfile",
    "minimax_lower_bound",
    "minimax_upper_bound",
    "minimax_constant",
    "dist_dependent_bound",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "ConfigError",
    "InvalidParamsError",
    "MomentDivergenceError",
    "HorizonExceededError",
    "NotEnoughSamplesError",
]
