"""Gradient-free optimization of noisy, discontinuous objectives.

Thin wrapper over the C++ core: Gaussian-smoothed gradient estimators
(mean and exponential), the decaying-schedule descent recursion, a
schedule validator, quadrature reference oracles, and the pairwise
ranking-risk example.
"""

from ._mollify import (
    GradEstimate,
    MollifyError,
    Objective,
    corpus_descriptors,
    empirical_auc_risk,
    ess,
    grad_exp_smooth,
    grad_mean_smooth,
    make_blobs,
    make_objective,
    normalized_weights,
    oracle_exp_grad,
    oracle_exp_value,
    oracle_mean_grad,
    oracle_mean_value,
    rescale_to_target_ess,
    run,
    stereographic,
    stereographic_inverse,
    validate_schedules,
)

__all__ = [
    "GradEstimate",
    "MollifyError",
    "Objective",
    "corpus_descriptors",
    "empirical_auc_risk",
    "ess",
    "grad_exp_smooth",
    "grad_mean_smooth",
    "make_blobs",
    "make_objective",
    "normalized_weights",
    "oracle_exp_grad",
    "oracle_exp_value",
    "oracle_mean_grad",
    "oracle_mean_value",
    "rescale_to_target_ess",
    "run",
    "stereographic",
    "stereographic_inverse",
    "validate_schedules",
]

__version__ = "0.1.0"
