"""Learning experiments: ERM, decisions under drift, exponential-family projection and Bayesian MER"""

from entropy_bounds.learning.bayesian_mer import (
    GridRegressionModel,
    LinearGaussianModel,
    gaussian_grid_prior,
    grid_posterior,
    mer_linear,
    mer_nonlinear_bound,
    smoothness_constant,
)
from entropy_bounds.learning.erm import (
    ErmRun,
    binary_classification_curve,
    erm,
    erm_from_samples,
    erm_sweep,
    lipschitz_grid_problem,
    lipschitz_rate_check,
)
from entropy_bounds.learning.expfam import (
    ExpFamily,
    expfam_conjugate,
    expfam_learning_experiment,
    expfam_logpartition,
    expfam_mean,
    expfam_project,
)
from entropy_bounds.learning.mismatch import (
    cond_entropy_diff_bounds,
    mismatch_excess,
    mismatched_estimator_bound,
)

__all__ = [
    "ErmRun",
    "ExpFamily",
    "GridRegressionModel",
    "LinearGaussianModel",
    "binary_classification_curve",
    "cond_entropy_diff_bounds",
    "erm",
    "erm_from_samples",
    "erm_sweep",
    "expfam_conjugate",
    "expfam_learning_experiment",
    "expfam_logpartition",
    "expfam_mean",
    "expfam_project",
    "gaussian_grid_prior",
    "grid_posterior",
    "lipschitz_grid_problem",
    "lipschitz_rate_check",
    "mer_linear",
    "mer_nonlinear_bound",
    "mismatch_excess",
    "mismatched_estimator_bound",
    "smoothness_constant",
]
