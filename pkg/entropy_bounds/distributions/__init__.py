"""Distribution representations, sampling and empirical distributions"""

from entropy_bounds.distributions.discrete import (
    ConditionalFamily,
    DiscreteDist,
    JointDiscrete,
    Marginals,
)
from entropy_bounds.distributions.gaussian import GaussianMixture, GaussianScalar
from entropy_bounds.distributions.sampling import (
    empirical,
    empirical_from_indices,
    rng_for,
    sample,
    sample_indices,
)

__all__ = [
    "ConditionalFamily",
    "DiscreteDist",
    "GaussianMixture",
    "GaussianScalar",
    "JointDiscrete",
    "Marginals",
    "empirical",
    "empirical_from_indices",
    "rng_for",
    "sample",
    "sample_indices",
]
