"""
CGF Envelopes and Legendre Duals
================================

The KL route to entropy continuity goes through the Donsker-Varadhan
variational formula. If the centered log-MGF of a loss column under Q is
dominated by an envelope phi on [0, b):

    log E_Q exp(lambda (f - E_Q f)) <= phi(lambda)

then E_P f - E_Q f <= phi*^{-1}(D(P || Q)), with

    phi*(gamma)      = sup_{0 <= lambda < b} lambda gamma - phi(lambda)   (Legendre dual)
    phi*^{-1}(x)     = sup { gamma : phi*(gamma) <= x }                   (generalized inverse)

Two envelopes have closed forms and serve as oracles:
- subgaussian  phi = s^2 lambda^2 / 2,                   phi*^{-1}(x) = sqrt(2 s^2 x)
- chi-square   phi = s^4 lambda^2 / (1 - 2 s^2 lambda),  phi*^{-1}(x) = 2 s^2 (sqrt(x) + x)

Numerics:
---------
The dual is a 1-D concave maximization. We scan a log-spaced lambda grid,
then refine around the best grid cell with a bounded Brent/golden-section
search to 1e-10 in lambda. The inverse is a bisection over gamma with
bracket expansion. The sublevel set uses "<= x"; for continuous strictly
increasing duals this coincides with the strict version.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from entropy_bounds.core.config import settings
from entropy_bounds.core.exceptions import ValidationException

logger = logging.getLogger(__name__)

POLE_CLAMP = 1e-9
GAMMA_CEILING = 1e15


@dataclass(frozen=True, eq=False)
class CgfEnvelope:
    """
    Envelope phi on [0, b) for a centered log-MGF.

    Attributes:
        phi: Vectorized function of lambda.
        b: Right end of the domain (may be +inf).
        name: Preset name, recorded in reports.
        params: Preset parameters, recorded in reports.
        trusted: True for analytic envelopes supplied without a grid check.
        grid_size: Number of log-spaced lambda points.
    """

    phi: Callable[[np.ndarray], np.ndarray]
    b: float = math.inf
    name: str = "custom"
    params: Dict[str, Any] = field(default_factory=dict)
    trusted: bool = True
    grid_size: int = field(default_factory=lambda: settings.LEGENDRE_GRID_SIZE)

    def __post_init__(self):
        if not self.b > 0:
            raise ValidationException("Envelope domain end b must be positive", details={"b": self.b})
        if self.grid_size < 8:
            raise ValidationException("Envelope grid needs at least 8 points")

    # -------------------------------------------------------------------------
    # Presets
    # -------------------------------------------------------------------------

    @classmethod
    def subgaussian(cls, sigma2: float) -> "CgfEnvelope":
        if sigma2 < 0:
            raise ValidationException("Subgaussian variance proxy must be nonnegative")
        return cls(lambda lam: 0.5 * sigma2 * np.asarray(lam) ** 2, math.inf, "subgaussian", {"sigma2": sigma2})

    @classmethod
    def chi_square(cls, sigma2: float) -> "CgfEnvelope":
        if sigma2 <= 0:
            raise ValidationException("Chi-square envelope needs sigma2 > 0")

        def phi(lam):
            lam = np.asarray(lam, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = sigma2 ** 2 * lam ** 2 / (1.0 - 2.0 * sigma2 * lam)
            return np.where(lam < 1.0 / (2.0 * sigma2), out, np.inf)

        return cls(phi, 1.0 / (2.0 * sigma2), "chi_square", {"sigma2": sigma2})

    @classmethod
    def from_table(cls, lambdas: Sequence[float], values: Sequence[float], b: Optional[float] = None) -> "CgfEnvelope":
        """Piecewise-linear envelope through (lambda, phi) points; +inf past the last point."""
        lam = np.asarray(lambdas, dtype=float)
        val = np.asarray(values, dtype=float)
        if lam.ndim != 1 or lam.shape != val.shape or lam.size < 2 or np.any(np.diff(lam) <= 0) or lam[0] != 0.0:
            raise ValidationException("Envelope table needs increasing lambdas starting at 0")
        end = float(lam[-1]) if b is None else float(b)

        def phi(x):
            x = np.asarray(x, dtype=float)
            return np.where(x <= lam[-1], np.interp(x, lam, val), np.inf)

        return cls(phi, end, "custom_table", {"points": int(lam.size)})

    @classmethod
    def exact(cls, values: np.ndarray, probs: np.ndarray, sign: float = 1.0) -> "CgfEnvelope":
        """The exact centered CGF of a discrete random variable (the tightest envelope)."""
        return cls(exact_cgf(values, probs, sign), math.inf, "exact_cgf", {"sign": sign}, trusted=False)

    # -------------------------------------------------------------------------

    @property
    def upper(self) -> float:
        if math.isinf(self.b):
            return settings.LEGENDRE_LAMBDA_CAP
        return min(self.b * (1.0 - POLE_CLAMP), settings.LEGENDRE_LAMBDA_CAP)

    def grid(self) -> np.ndarray:
        upper = self.upper
        return np.geomspace(upper * 1e-9, upper, self.grid_size)

    def __call__(self, lam):
        return np.asarray(self.phi(lam), dtype=float)

    def describe(self) -> str:
        args = ", ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({args})"


def exact_cgf(values: np.ndarray, probs: np.ndarray, sign: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """lambda -> log E exp(sign * lambda * (f - E f)) for a discrete f."""
    values = np.asarray(values, dtype=float)
    probs = np.asarray(probs, dtype=float)
    mask = probs > 0
    if not np.all(np.isfinite(values[mask])):
        raise ValidationException("CGF of a variable with infinite values")
    f, w = values[mask], probs[mask]
    centered = sign * (f - w @ f)

    def cgf(lam):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        out = logsumexp(lam[:, None] * centered[None, :], b=w[None, :], axis=1)
        return np.maximum(out, 0.0)

    return cgf


def legendre_dual(env: CgfEnvelope, gamma: float) -> float:
    """
    sup over 0 <= lambda < b of lambda * gamma - phi(lambda).

    Returns +inf when the objective is still increasing at the end of an
    unbounded lambda range.
    """
    lams = env.grid()
    with np.errstate(invalid="ignore", over="ignore"):
        vals = lams * gamma - env(lams)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    floor = -float(env(np.array([0.0]))[0])

    best = int(np.argmax(vals))
    if math.isinf(env.b) and best == lams.size - 1 and vals[best] > vals[best - 1]:
        return math.inf
    if not np.isfinite(vals[best]):
        return floor

    left = 0.0 if best == 0 else lams[best - 1]
    right = lams[min(best + 1, lams.size - 1)]
    res = minimize_scalar(
        lambda lam: -(lam * gamma - float(env(np.array([lam]))[0])),
        bounds=(left, right),
        method="bounded",
        options={"xatol": 1e-10},
    )
    refined = -float(res.fun) if np.isfinite(res.fun) else -np.inf
    return max(float(vals[best]), refined, floor)


def generalized_inverse(env: CgfEnvelope, x: float, max_iter: int = 200) -> float:
    """
    sup { gamma : legendre_dual(env, gamma) <= x } by bracketed bisection.

    Returns +inf when the dual never exceeds x.
    """
    if x < 0 or math.isnan(x):
        raise ValidationException("Generalized inverse needs x >= 0", details={"x": x})
    if math.isinf(x):
        return math.inf
    if x == 0.0:
        return 0.0

    def ok(gamma: float) -> bool:
        return legendre_dual(env, gamma) <= x

    # 1. Bracket: ok(lo) and not ok(hi)
    if ok(0.0):
        lo, hi = 0.0, 1.0
        while ok(hi):
            lo, hi = hi, 2.0 * hi
            if hi > GAMMA_CEILING:
                return math.inf
    else:
        lo, hi = -1.0, 0.0
        while not ok(lo):
            hi, lo = lo, 2.0 * lo
            if lo < -GAMMA_CEILING:
                return -math.inf

    # 2. Bisection
    for _ in range(max_iter):
        if hi - lo <= 1e-13 * max(1.0, abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def kl_bound_from_cgf(env: CgfEnvelope, kl_value: float) -> float:
    """phi*^{-1}(D), the KL-route bound on E_P f - E_Q f."""
    if kl_value < 0:
        raise ValidationException("KL value must be nonnegative", details={"kl": kl_value})
    if math.isinf(kl_value):
        return math.inf
    return generalized_inverse(env, kl_value)


def envelope_violation(env: CgfEnvelope, values: np.ndarray, probs: np.ndarray, sign: float = 1.0) -> Optional[float]:
    """
    First lambda on the envelope grid where the exact CGF exceeds phi.

    Returns:
        The violating lambda, or None when the condition holds on the grid.
    """
    lams = env.grid()
    cgf = exact_cgf(values, probs, sign)(lams)
    bound = env(lams)
    bad = cgf > bound + 1e-12 * np.maximum(1.0, np.abs(bound))
    if np.any(bad):
        lam = float(lams[int(np.argmax(bad))])
        logger.info("CGF envelope %s violated at lambda=%.6g", env.describe(), lam)
        return lam
    return None
