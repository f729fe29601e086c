"""
f-Divergences and Renyi Quantities
==================================

Conventions shared by every function here:
- discrete inputs must share the same ordered support (zero masses included);
- 0 * log 0 = 0;
- a support violation (p > 0 where q = 0) gives +inf, not an error.
"""

import logging
import math
from typing import Union

import numpy as np
from scipy import integrate
from scipy.special import logsumexp, rel_entr, xlogy

from entropy_bounds.core.exceptions import ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist
from entropy_bounds.distributions.gaussian import GaussianMixture, GaussianScalar

logger = logging.getLogger(__name__)

AnyDist = Union[DiscreteDist, GaussianScalar, GaussianMixture]


def tv(P: DiscreteDist, Q: DiscreteDist) -> float:
    """Total variation distance 1/2 sum |p - q|."""
    P.require_same_support(Q)
    return float(min(1.0, 0.5 * np.abs(P.probs - Q.probs).sum()))


def _kl_gaussian(P: GaussianScalar, Q: GaussianScalar) -> float:
    return (
        0.5 * math.log(Q.variance / P.variance)
        + (P.variance + (P.mean - Q.mean) ** 2) / (2.0 * Q.variance)
        - 0.5
    )


def _kl_by_quadrature(P, Q: GaussianScalar) -> float:
    lo, hi = P.support_interval()
    lo, hi = min(lo, Q.support_interval()[0]), max(hi, Q.support_interval()[1])
    points = sorted(set(np.atleast_1d(getattr(P, "means", P.mean)).tolist()))

    def integrand(x):
        lp = float(P.logpdf(x))
        return math.exp(lp) * (lp - float(Q.logpdf(x)))

    value, _ = integrate.quad(integrand, lo, hi, points=points, limit=400, epsabs=1e-12, epsrel=1e-10)
    return max(0.0, float(value))


def kl(P: AnyDist, Q: AnyDist) -> float:
    """
    D(P || Q) in nats.

    Discrete pairs use the exact sum, Gaussian pairs the closed form, and a
    Gaussian mixture against a Gaussian uses adaptive quadrature. A discrete
    P against a continuous Q (or the reverse) has no density ratio: +inf.
    """
    if isinstance(P, DiscreteDist) and isinstance(Q, DiscreteDist):
        P.require_same_support(Q)
        return float(rel_entr(P.probs, Q.probs).sum())
    if isinstance(P, GaussianScalar) and isinstance(Q, GaussianScalar):
        return _kl_gaussian(P, Q)
    if isinstance(P, GaussianMixture) and isinstance(Q, GaussianScalar):
        return _kl_by_quadrature(P, Q)
    if isinstance(P, DiscreteDist) != isinstance(Q, DiscreteDist):
        return math.inf
    raise ValidationException(
        "KL not implemented for this pair",
        details={"P": type(P).__name__, "Q": type(Q).__name__},
    )


def chi2(P: DiscreteDist, Q: DiscreteDist) -> float:
    """chi^2(P || Q) = sum (p - q)^2 / q, +inf on a support violation."""
    P.require_same_support(Q)
    p, q = P.probs, Q.probs
    if np.any((q == 0) & (p > 0)):
        return math.inf
    mask = q > 0
    return float(np.sum((p[mask] - q[mask]) ** 2 / q[mask]))


def renyi_cross(Q: DiscreteDist, P: DiscreteDist, alpha: float) -> float:
    """
    Renyi cross entropy of order alpha:

        R_alpha(Q, P) = 1/(1 - alpha) * log sum_{Q(z) > 0} Q(z) P(z)^(alpha - 1)

    alpha = 1 returns the ordinary cross entropy -sum Q log P.
    """
    Q.require_same_support(P)
    mask = Q.probs > 0
    q, p = Q.probs[mask], P.probs[mask]
    if alpha == 1.0:
        value = float(-xlogy(q, p).sum())
        if math.isinf(value):
            logger.debug("cross entropy is +inf: P vanishes on the support of Q")
        return value
    with np.errstate(divide="ignore"):
        log_p = np.log(p)
        exponent = (alpha - 1.0) * log_p
    exponent = np.where(np.isnan(exponent), -np.inf, exponent)
    log_sum = float(logsumexp(exponent, b=q))
    if math.isinf(log_sum):
        logger.debug("Renyi cross entropy at alpha=%s is +inf", alpha)
        return math.inf
    return log_sum / (1.0 - alpha)


def renyi_entropy(Q: DiscreteDist, alpha: float) -> float:
    """R_alpha(Q) = R_alpha(Q, Q)."""
    return renyi_cross(Q, Q, alpha)
