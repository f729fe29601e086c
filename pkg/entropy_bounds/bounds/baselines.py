"""
Literature Baselines
====================

Entropy-difference bounds from the literature that the new bounds are
compared against. All values are in nats and all bound |H(P) - H(Q)|.

Shannon entropy, discrete:
    csiszar_korner   2t log(|Z| / 2t)               needs t = d_TV <= 1/4
    coupling         t log(|Z| - 1) + h2(t)         saturates at log|Z| past t = 1 - 1/|Z|

Differential entropy, densities:
    regular_w2       ((c1/2)(sqrt E_P Z^2 + sqrt E_Q Z^2) + c2) W2(P, Q)
                     for (c1, c2)-regular densities, |grad log p(z)| <= c1 |z| + c2

Variance (quadratic loss):
    variance_w2      2 (sqrt E_P Z^2 + sqrt E_Q Z^2) W2(P, Q)
"""

import logging
import math
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.special import entr

from entropy_bounds.bounds.report import BoundReport
from entropy_bounds.core.exceptions import NotApplicableException, ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist
from entropy_bounds.distributions.gaussian import GaussianMixture, GaussianScalar
from entropy_bounds.divergence.f_divergences import tv
from entropy_bounds.divergence.transport import wasserstein2_1d

logger = logging.getLogger(__name__)

AnyDist = Union[DiscreteDist, GaussianScalar, GaussianMixture]
BASELINE_TARGETS = ("shannon", "variance")


def binary_entropy(t: float) -> float:
    """h2(t) in nats."""
    if not 0.0 <= t <= 1.0:
        raise ValidationException("Binary entropy argument outside [0, 1]", details={"t": t})
    return float(entr(t) + entr(1.0 - t))


def csiszar_korner_bound(P: DiscreteDist, Q: DiscreteDist) -> BoundReport:
    name, citation = "csiszar_korner.abs", "csiszar-korner-tv"
    t = tv(P, Q)
    if t > 0.25:
        return BoundReport.not_applicable(name, f"d_TV = {t:.6g} exceeds 1/4", citation)
    # 2t log(k / 2t) -> 0 as t -> 0
    value = 0.0 if t == 0.0 else 2.0 * t * math.log(len(P) / (2.0 * t))
    return BoundReport(
        name=name,
        value=value,
        applicable=True,
        conditions=[f"d_TV = {t:.6g} <= 1/4"],
        citation=citation,
        extras={"tv": t},
    )


def coupling_bound(P: DiscreteDist, Q: DiscreteDist) -> BoundReport:
    k = len(P)
    t = tv(P, Q)
    if k < 2:
        value, conditions = 0.0, ["single-point support"]
    elif t >= 1.0 - 1.0 / k:
        value, conditions = math.log(k), [f"d_TV = {t:.6g} >= 1 - 1/|Z|, saturated at log|Z|"]
    else:
        value = t * math.log(k - 1) + binary_entropy(t)
        conditions = [f"d_TV = {t:.6g} < 1 - 1/|Z|"]
    return BoundReport(
        name="coupling.abs",
        value=value,
        applicable=True,
        conditions=conditions,
        citation="coupling-tv-baseline",
        extras={"tv": t},
    )


def regularity_constants(dist: AnyDist) -> Tuple[float, float]:
    """
    (c1, c2) with |d/dz log p(z)| <= c1 |z| + c2.

    N(mu, s2) gives (1/s2, |mu|/s2); a mixture takes the worst component.
    """
    if isinstance(dist, GaussianScalar):
        return 1.0 / dist.variance, abs(dist.mean) / dist.variance
    if isinstance(dist, GaussianMixture):
        return float(np.max(1.0 / dist.variances)), float(np.max(np.abs(dist.means) / dist.variances))
    raise NotApplicableException("Regularity constants need a density", details={"type": type(dist).__name__})


def _root_moments(P: AnyDist, Q: AnyDist) -> float:
    return math.sqrt(P.second_moment()) + math.sqrt(Q.second_moment())


def regular_density_w2_bound(
    P: AnyDist,
    Q: AnyDist,
    c1: Optional[float] = None,
    c2: Optional[float] = None,
) -> BoundReport:
    name, citation = "regular_w2.abs", "regular-density-w2"
    if isinstance(P, DiscreteDist) or isinstance(Q, DiscreteDist):
        return BoundReport.not_applicable(name, "needs two densities", citation)
    try:
        if c1 is None or c2 is None:
            derived = [regularity_constants(P), regularity_constants(Q)]
            c1 = max(c for c, _ in derived) if c1 is None else c1
            c2 = max(c for _, c in derived) if c2 is None else c2
            conditions = [f"(c1, c2) = ({c1:.6g}, {c2:.6g}) derived from the Gaussian parameters"]
        else:
            conditions = [f"(c1, c2) = ({c1:.6g}, {c2:.6g}) supplied"]
        w2 = wasserstein2_1d(P, Q)
    except NotApplicableException as exc:
        return BoundReport.not_applicable(name, exc.message, citation)
    value = (0.5 * c1 * _root_moments(P, Q) + c2) * w2
    return BoundReport(
        name=name,
        value=value,
        applicable=True,
        conditions=conditions,
        citation=citation,
        extras={"c1": c1, "c2": c2, "w2": w2},
    )


def variance_w2_bound(P: AnyDist, Q: AnyDist) -> BoundReport:
    name, citation = "variance_w2.abs", "variance-w2"
    try:
        w2 = wasserstein2_1d(P, Q)
        roots = _root_moments(P, Q)
    except (NotApplicableException, ValidationException) as exc:
        return BoundReport.not_applicable(name, exc.message, citation)
    return BoundReport(
        name=name,
        value=2.0 * roots * w2,
        applicable=True,
        conditions=["real-valued outcomes with finite second moments"],
        citation=citation,
        extras={"w2": w2},
    )


def baseline_bounds(
    P: AnyDist,
    Q: AnyDist,
    target: Optional[str] = None,
    c1: Optional[float] = None,
    c2: Optional[float] = None,
) -> List[BoundReport]:
    """
    Every baseline for the pair.

    Args:
        P, Q: Two discrete distributions on one support, or two scalar densities.
        target: ``"shannon"`` (entropy baselines), ``"variance"`` or None for both.
        c1, c2: Regularity constants; derived for Gaussian inputs when omitted.
    """
    if target is not None and target not in BASELINE_TARGETS:
        raise ValidationException(f"Unknown baseline target {target!r}", details={"valid": list(BASELINE_TARGETS)})
    reports: List[BoundReport] = []
    if target in (None, "shannon"):
        if isinstance(P, DiscreteDist) and isinstance(Q, DiscreteDist):
            reports += [csiszar_korner_bound(P, Q), coupling_bound(P, Q)]
        reports.append(regular_density_w2_bound(P, Q, c1, c2))
    if target in (None, "variance"):
        reports.append(variance_w2_bound(P, Q))
    logger.debug("computed %d baseline reports", len(reports))
    return reports
