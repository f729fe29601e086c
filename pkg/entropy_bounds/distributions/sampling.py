"""
Sampling and Empirical Distributions
====================================

RNG contract: every draw comes from a Philox counter-based generator keyed
by ``SeedSequence([seed, trial, attempt])``. Each trial owns its own stream,
so running trials in a thread pool reproduces the serial output exactly.
"""

from collections import Counter
from typing import Any, Hashable, List, Sequence, Union

import numpy as np

from entropy_bounds.core.exceptions import ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist, JointDiscrete, freeze_label
from entropy_bounds.distributions.gaussian import GaussianMixture, GaussianScalar

Samplable = Union[DiscreteDist, GaussianScalar, GaussianMixture, JointDiscrete]


def rng_for(seed: int, trial: int = 0, attempt: int = 0) -> np.random.Generator:
    """Independent generator for one (seed, trial, attempt) triple."""
    if min(seed, trial, attempt) < 0:
        raise ValidationException(
            "Seeds and trial indices must be nonnegative",
            details={"seed": seed, "trial": trial, "attempt": attempt},
        )
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial, attempt])))


def sample_indices(dist: DiscreteDist, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. outcome indices from a discrete distribution."""
    if n < 0:
        raise ValidationException("Sample size must be nonnegative", details={"n": n})
    return rng.choice(len(dist), size=n, p=dist.probs)


def sample(dist: Samplable, n: int, seed: int, trial: int = 0) -> List[Any]:
    """
    Draw n i.i.d. outcomes, deterministic given (seed, trial).

    Args:
        dist: Discrete, Gaussian, Gaussian-mixture or joint distribution.
        n: Number of draws (0 gives an empty list).
        seed: Experiment seed.
        trial: Trial index selecting the stream.

    Returns:
        Outcome labels (discrete), floats (scalar continuous) or (x, y) pairs (joint).
    """
    if n < 0:
        raise ValidationException("Sample size must be nonnegative", details={"n": n})
    rng = rng_for(seed, trial)
    if isinstance(dist, JointDiscrete):
        flat = dist.flatten()
        return [flat.outcomes[i] for i in sample_indices(flat, n, rng)]
    if isinstance(dist, DiscreteDist):
        return [dist.outcomes[i] for i in sample_indices(dist, n, rng)]
    if isinstance(dist, GaussianScalar):
        return rng.normal(dist.mean, dist.std, size=n).tolist()
    if isinstance(dist, GaussianMixture):
        comp = rng.choice(dist.weights.size, size=n, p=dist.weights)
        return rng.normal(dist.means[comp], np.sqrt(dist.variances[comp])).tolist()
    raise ValidationException("Unsupported distribution type", details={"type": type(dist).__name__})


def empirical(samples: Sequence[Hashable], support: Sequence[Hashable]) -> DiscreteDist:
    """
    Empirical distribution of samples over a fixed support.

    Zero-count outcomes are kept with probability 0.
    """
    support = tuple(freeze_label(s) for s in support)
    if not support:
        raise ValidationException("Support must be nonempty")
    if not samples:
        raise ValidationException("Empirical distribution of zero samples is undefined")
    counts = Counter(freeze_label(s) for s in samples)
    unknown = [label for label in counts if label not in set(support)]
    if unknown:
        raise ValidationException("Sample outside support", details={"label": unknown[0]})
    n = len(samples)
    return DiscreteDist(support, np.array([counts.get(o, 0) for o in support], dtype=float) / n)


def empirical_from_indices(indices: np.ndarray, support: Sequence[Hashable]) -> DiscreteDist:
    """Fast path of ``empirical`` for index-coded samples."""
    if len(indices) == 0:
        raise ValidationException("Empirical distribution of zero samples is undefined")
    counts = np.bincount(indices, minlength=len(support))
    return DiscreteDist(tuple(support), counts / counts.sum())
