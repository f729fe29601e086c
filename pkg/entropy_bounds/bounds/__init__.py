"""Entropy-difference bounds, literature baselines and mutual-information bounds"""

from entropy_bounds.bounds.baselines import baseline_bounds, binary_entropy
from entropy_bounds.bounds.continuity import (
    BOUND_FAMILIES,
    chi2_bound,
    entropy_difference_report,
    evaluate_bounds,
    gaussian_variance_kl_bound,
    kl_general_bound,
    kl_subgaussian_bound,
    pushforward_bounds,
    renyi_condition_bound,
    semidistance_bound,
    tv_bound,
    wasserstein_lipschitz_bound,
)
from entropy_bounds.bounds.mutual_information import (
    lautum_information,
    mi_upper_bounds,
    mutual_information,
)
from entropy_bounds.bounds.report import BoundReport, absolute_report

__all__ = [
    "BOUND_FAMILIES",
    "BoundReport",
    "absolute_report",
    "baseline_bounds",
    "binary_entropy",
    "chi2_bound",
    "entropy_difference_report",
    "evaluate_bounds",
    "gaussian_variance_kl_bound",
    "kl_general_bound",
    "kl_subgaussian_bound",
    "lautum_information",
    "mi_upper_bounds",
    "mutual_information",
    "pushforward_bounds",
    "renyi_condition_bound",
    "semidistance_bound",
    "tv_bound",
    "wasserstein_lipschitz_bound",
]
