"""
Scalar Gaussian Distributions
=============================

Scalar Gaussians carry the closed forms (entropy, KL, W2) used by the
variance corollary and the baselines. A finite Gaussian mixture is the one
non-Gaussian continuous P accepted there; its KL against a Gaussian is
computed by quadrature.
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from entropy_bounds.core.exceptions import ValidationException


@dataclass(frozen=True)
class GaussianScalar:
    """N(mean, variance) with variance > 0."""

    mean: float
    variance: float

    def __post_init__(self):
        if not np.isfinite(self.mean):
            raise ValidationException("Gaussian mean must be finite")
        if not (np.isfinite(self.variance) and self.variance > 0):
            raise ValidationException(
                "Gaussian variance must be strictly positive",
                details={"variance": self.variance},
            )
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "variance", float(self.variance))

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))

    def second_moment(self) -> float:
        return self.mean ** 2 + self.variance

    def logpdf(self, x):
        return stats.norm.logpdf(x, loc=self.mean, scale=self.std)

    def pdf(self, x):
        return stats.norm.pdf(x, loc=self.mean, scale=self.std)

    def support_interval(self, width: float = 8.0) -> Tuple[float, float]:
        return self.mean - width * self.std, self.mean + width * self.std

    def to_dict(self) -> Dict[str, Any]:
        return {"family": "gaussian", "mean": self.mean, "variance": self.variance}


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """
    Finite mixture sum_i w_i N(mean_i, variance_i).
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        m = np.array(self.means, dtype=float)
        v = np.array(self.variances, dtype=float)
        if not (w.ndim == m.ndim == v.ndim == 1 and w.size == m.size == v.size > 0):
            raise ValidationException("Mixture weights, means and variances must be equal-length vectors")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValidationException("Mixture weights must be a probability vector")
        if np.any(v <= 0) or not np.all(np.isfinite(m)):
            raise ValidationException("Mixture components need finite means and positive variances")
        for name, arr in (("weights", w / w.sum()), ("means", m), ("variances", v)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def mean(self) -> float:
        return float(self.weights @ self.means)

    @property
    def variance(self) -> float:
        # law of total variance
        return float(self.weights @ (self.variances + self.means ** 2) - self.mean ** 2)

    def second_moment(self) -> float:
        return float(self.weights @ (self.variances + self.means ** 2))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        comp = stats.norm.logpdf(x[..., None], loc=self.means, scale=np.sqrt(self.variances))
        return logsumexp(comp, b=self.weights, axis=-1)

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def support_interval(self, width: float = 8.0) -> Tuple[float, float]:
        sd = np.sqrt(self.variances)
        return float(np.min(self.means - width * sd)), float(np.max(self.means + width * sd))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": "gaussian_mixture",
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }
