"""Nonparametric change-point estimation for dependent sequences.

Estimates the location of a change in the marginal distribution of a series
by maximizing a weighted seminorm profile of left/right empirical-measure
differences, together with generators for long- and short-range dependent
test sequences and a Monte-Carlo harness that checks the 1/n error scaling.
"""

__version__ = "0.1.0"

from .errors import CovarianceNotPD, InvalidInput
from .estimator import (
    ChangePointEstimate,
    EstimatorConfig,
    compute_profile,
    estimate_change_point,
    profile_at,
    split_weight,
    validate_series,
)
from .generators import (
    DEFAULT_TRANSFORMS,
    TRANSFORMS,
    AcfSpec,
    GeneratorSpec,
    SeedSpec,
    apply_change,
    durbin_levinson_filter,
    durbin_levinson_sample,
    generate,
    linear_process_sample,
    polynomial_acf,
)
from .montecarlo import (
    DecayDiagnostic,
    ExperimentConfig,
    MaeRow,
    RateReport,
    decay_diagnostic,
    mean_ci,
    rate_check,
    run_experiment,
)
from .seminorms import (
    SeminormSpec,
    evaluate_indicator_norm,
    evaluate_moment_norm,
)

__all__ = [
    "AcfSpec",
    "ChangePointEstimate",
    "CovarianceNotPD",
    "DecayDiagnostic",
    "DEFAULT_TRANSFORMS",
    "EstimatorConfig",
    "ExperimentConfig",
    "GeneratorSpec",
    "InvalidInput",
    "MaeRow",
    "RateReport",
    "SeedSpec",
    "SeminormSpec",
    "TRANSFORMS",
    "apply_change",
    "compute_profile",
    "decay_diagnostic",
    "durbin_levinson_filter",
    "durbin_levinson_sample",
    "estimate_change_point",
    "evaluate_indicator_norm",
    "evaluate_moment_norm",
    "generate",
    "linear_process_sample",
    "mean_ci",
    "polynomial_acf",
    "profile_at",
    "rate_check",
    "run_experiment",
    "split_weight",
    "validate_series",
]
