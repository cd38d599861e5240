"""Posterior sampling for exponential-family models whose normalizing
constant is intractable, with point-process simulators, spatial summary
statistics, and an experiment CLI.

The core entry points are :func:`abc_shadow_run` (the shadow posterior
sampler), :func:`pp_mh_simulate` (birth/death/move simulation of the
point-process models), :func:`estimate_summaries` / :func:`envelope_test`
(pattern analysis), and :func:`summarize` / :func:`error_estimates`
(posterior post-processing).
"""

from .core import (
    BoxPrior,
    DomainError,
    MarkedPoint,
    PointPattern,
    RngState,
    Window,
    as_generator,
    box_ball_propose,
    prior_density,
)
from .geometry import (
    area_statistic,
    candy_counts,
    orientation_distance,
    pair_count,
    segment_endpoints,
    union_disks_area,
)
from .mcmc import (
    ABCResult,
    ChainTrace,
    PPSamplerConfig,
    ShadowConfig,
    abc_knn,
    abc_rejection,
    abc_shadow_run,
    aux_var_mh,
    default_aux_sweeps,
    gaussian_direct_mh,
    gaussian_log_posterior,
    ideal_acceptance_numeric,
    pp_mh_simulate,
    shadow_acceptance,
)
from .models import (
    AreaInteractionModel,
    CandyModel,
    GaussianModel,
    StraussModel,
    gaussian_log_norm_const,
    in_domain,
    log_unnormalized_density,
    model_from_dict,
    model_to_dict,
    natural_parameters,
    param_names,
    sample_gaussian_exact,
    stat_names,
    sufficient_statistics,
    validate_statistics,
)
from .posterior import (
    ErrorEstimates,
    KdeResult,
    PosteriorSummary,
    error_estimates,
    kde_map,
    marginal_kde,
    summarize,
)
from .summaries import (
    EnvelopeResult,
    SummaryCurves,
    default_ranges,
    envelope_test,
    estimate_summaries,
    pattern_intensity,
    poisson_theoretical,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ABCResult",
    "AreaInteractionModel",
    "BoxPrior",
    "CandyModel",
    "ChainTrace",
    "DomainError",
    "EnvelopeResult",
    "ErrorEstimates",
    "GaussianModel",
    "KdeResult",
    "MarkedPoint",
    "PPSamplerConfig",
    "PointPattern",
    "PosteriorSummary",
    "RngState",
    "ShadowConfig",
    "StraussModel",
    "SummaryCurves",
    "Window",
    "abc_knn",
    "abc_rejection",
    "abc_shadow_run",
    "area_statistic",
    "as_generator",
    "aux_var_mh",
    "box_ball_propose",
    "candy_counts",
    "default_aux_sweeps",
    "default_ranges",
    "envelope_test",
    "error_estimates",
    "estimate_summaries",
    "gaussian_direct_mh",
    "gaussian_log_norm_const",
    "gaussian_log_posterior",
    "ideal_acceptance_numeric",
    "in_domain",
    "kde_map",
    "log_unnormalized_density",
    "marginal_kde",
    "model_from_dict",
    "model_to_dict",
    "natural_parameters",
    "orientation_distance",
    "pair_count",
    "param_names",
    "pattern_intensity",
    "poisson_theoretical",
    "pp_mh_simulate",
    "prior_density",
    "sample_gaussian_exact",
    "segment_endpoints",
    "shadow_acceptance",
    "stat_names",
    "sufficient_statistics",
    "summarize",
    "union_disks_area",
    "validate_statistics",
]
