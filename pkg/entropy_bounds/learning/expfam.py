"""
Exponential-Family Projection Learning
======================================

A finite-Z exponential family Q_theta(z) = nu(z) exp{theta . phi(z) - A(theta)}.
Projecting a target P onto the family (the member minimizing D(P || Q_theta))
is moment matching, grad A(theta*) = mu = E_P[phi(Z)], and the maximum-likelihood
estimate from n samples matches the empirical moments mu_hat instead.

Using the Bayes rule of Q_hat = Q_{theta_hat} under P costs at most

    2 tv(P, Q*) + sqrt(2 (|mu| |theta* - theta_hat| + |A(theta*) - A(theta_hat)|))

(approximation term + estimation term) for losses in [0, 1].
"""

import logging
import math
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import linprog
from scipy.special import logsumexp

from entropy_bounds.core.config import settings
from entropy_bounds.core.exceptions import (
    BoundViolationException,
    NonConvergenceException,
    ValidationException,
)
from entropy_bounds.distributions.discrete import DiscreteDist, JointDiscrete, freeze_label
from entropy_bounds.distributions.sampling import empirical_from_indices, rng_for, sample_indices
from entropy_bounds.divergence.f_divergences import kl, tv
from entropy_bounds.entropy.generalized import conditional_entropy, rule_risk
from entropy_bounds.experiments.runner import ExperimentResult, TrialRunner
from entropy_bounds.learning.mismatch import loss_interval
from entropy_bounds.losses.loss_spec import LossSpec

logger = logging.getLogger(__name__)

EXPONENT_SPREAD_MAX = 700.0
BOUNDARY_MARGIN = 1e-12
ARMIJO_C = 1e-4


@dataclass(frozen=True, eq=False)
class ExpFamily:
    """
    Exponential family over a finite support.

    Attributes:
        outcomes: Support labels Z.
        potential: |Z| x d sufficient statistics phi(z).
        base: Positive base weights nu(z).
    """

    outcomes: Tuple[Hashable, ...]
    potential: np.ndarray
    base: np.ndarray

    def __post_init__(self):
        outcomes = tuple(freeze_label(o) for o in self.outcomes)
        potential = np.array(self.potential, dtype=float)
        if potential.ndim == 1:
            potential = potential[:, None]
        base = np.array(self.base, dtype=float)
        if potential.shape[0] != len(outcomes) or base.shape != (len(outcomes),):
            raise ValidationException(
                "Potential and base weights must have one row per outcome",
                details={"outcomes": len(outcomes), "potential": list(potential.shape), "base": list(base.shape)},
            )
        if not np.all(np.isfinite(potential)):
            raise ValidationException("Potential must be finite")
        if not np.all(base > 0):
            raise ValidationException("Base weights must be positive")
        # minimal iff phi(z) - phi(z0) spans R^d
        rank = np.linalg.matrix_rank(potential - potential[0]) if len(outcomes) > 1 else 0
        if rank < potential.shape[1]:
            raise ValidationException(
                "Family is not minimal: centered potential is rank deficient",
                details={"rank": int(rank), "dimension": potential.shape[1]},
            )
        potential.setflags(write=False)
        base.setflags(write=False)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "potential", potential)
        object.__setattr__(self, "base", base)

    @classmethod
    def bernoulli(cls) -> "ExpFamily":
        """phi(z) = z, nu = 1 on {0, 1}: A(theta) = log(1 + e^theta)."""
        return cls((0, 1), np.array([[0.0], [1.0]]), np.ones(2))

    @classmethod
    def from_potential(
        cls,
        outcomes: Sequence[Hashable],
        potential: Sequence[Sequence[float]],
        base: Optional[Sequence[float]] = None,
    ) -> "ExpFamily":
        base = np.ones(len(outcomes)) if base is None else base
        return cls(tuple(outcomes), np.asarray(potential, dtype=float), np.asarray(base, dtype=float))

    @property
    def dimension(self) -> int:
        return self.potential.shape[1]

    def moments(self, dist: DiscreteDist) -> np.ndarray:
        """E_dist[phi(Z)] for a distribution on the family's support."""
        return dist.reorder(self.outcomes).probs @ self.potential


def _exponents(fam: ExpFamily, theta) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape != (fam.dimension,):
        raise ValidationException(
            "Natural parameter has the wrong dimension", details={"expected": fam.dimension, "got": list(theta.shape)}
        )
    exponents = fam.potential @ theta + np.log(fam.base)
    if np.ptp(exponents) > EXPONENT_SPREAD_MAX:
        raise ValidationException(
            "theta . phi spread exceeds the overflow guard",
            details={"spread": float(np.ptp(exponents)), "limit": EXPONENT_SPREAD_MAX},
        )
    return exponents


def expfam_logpartition(fam: ExpFamily, theta) -> float:
    """A(theta) = log sum_z nu(z) exp{theta . phi(z)}."""
    return float(logsumexp(_exponents(fam, theta)))


def expfam_distribution(fam: ExpFamily, theta) -> DiscreteDist:
    exponents = _exponents(fam, theta)
    return DiscreteDist(fam.outcomes, np.exp(exponents - logsumexp(exponents)))


def expfam_mean(fam: ExpFamily, theta) -> np.ndarray:
    """grad A(theta) = E_{Q_theta}[phi(Z)]."""
    return expfam_distribution(fam, theta).probs @ fam.potential


def _covariance(fam: ExpFamily, probs: np.ndarray) -> np.ndarray:
    centered = fam.potential - probs @ fam.potential
    return (centered * probs[:, None]).T @ centered


def interior_margin(fam: ExpFamily, mu: np.ndarray) -> float:
    """
    Largest t such that mu = sum_z w(z) phi(z) with every w(z) >= t.

    Positive exactly when mu lies in the interior of the mean polytope.
    -inf when mu is outside it.
    """
    k = len(fam.outcomes)
    c = np.zeros(k + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-np.eye(k), np.ones((k, 1))])
    a_eq = np.vstack([np.append(np.ones(k), 0.0), np.hstack([fam.potential.T, np.zeros((fam.dimension, 1))])])
    b_eq = np.append(1.0, mu)
    result = linprog(
        c,
        A_ub=a_ub,
        b_ub=np.zeros(k),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0, None)] * k + [(None, 1.0)],
        method="highs-ds",
    )
    if result.status == 2:
        return -math.inf
    if result.status != 0:
        raise NonConvergenceException("Interior-margin LP failed", details={"status": int(result.status), "message": result.message})
    return float(-result.fun)


def _project_mean(fam: ExpFamily, mu: np.ndarray) -> np.ndarray:
    """Damped Newton on A(theta) - theta . mu starting at theta = 0."""
    margin = interior_margin(fam, mu)
    if margin <= BOUNDARY_MARGIN:
        raise NonConvergenceException(
            "Moment vector is on the boundary of the mean polytope; no finite projection",
            details={"mu": mu.tolist(), "margin": margin},
        )

    def objective(theta: np.ndarray) -> float:
        try:
            return expfam_logpartition(fam, theta) - float(theta @ mu)
        except ValidationException:
            return math.inf

    theta = np.zeros(fam.dimension)
    value = objective(theta)
    residual = math.inf
    for iteration in range(settings.NEWTON_MAX_ITER):
        probs = expfam_distribution(fam, theta).probs
        grad = probs @ fam.potential - mu
        residual = float(np.max(np.abs(grad)))
        try:
            step = np.linalg.solve(_covariance(fam, probs), -grad)
        except np.linalg.LinAlgError:
            step = -grad
        if residual < settings.NEWTON_TOL:
            # final undamped step
            logger.debug("projection converged in %d iterations (residual %.3g)", iteration, residual)
            return theta + step
        slope = float(grad @ step)
        t = 1.0
        candidate = objective(theta + step)
        while candidate > value + ARMIJO_C * t * slope and t > 1e-12:
            t *= 0.5
            candidate = objective(theta + t * step)
        theta, value = theta + t * step, candidate

    raise NonConvergenceException(
        "Newton projection did not converge",
        details={"iterations": settings.NEWTON_MAX_ITER, "residual": residual, "theta": theta.tolist()},
    )


def expfam_project(fam: ExpFamily, target: Union[DiscreteDist, Sequence[float]]) -> Tuple[np.ndarray, DiscreteDist]:
    """
    Reverse-KL projection of ``target`` onto the family by moment matching.

    ``target`` is a distribution on the family's support or a moment vector
    mu directly (the MLE case passes mu_hat).

    Returns:
        (theta*, Q_{theta*}) with max|grad A(theta*) - mu| < NEWTON_TOL.

    Raises:
        NonConvergenceException: mu on the boundary of (or outside) the mean
            polytope, or Newton exhausted its iterations.
    """
    mu = fam.moments(target) if isinstance(target, DiscreteDist) else np.atleast_1d(np.asarray(target, dtype=float))
    theta = _project_mean(fam, mu)
    return theta, expfam_distribution(fam, theta)


def expfam_conjugate(fam: ExpFamily, mu: Sequence[float]) -> float:
    """A*(mu) = theta* . mu - A(theta*) with grad A(theta*) = mu."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    theta = _project_mean(fam, mu)
    return float(theta @ mu) - expfam_logpartition(fam, theta)


# =============================================================================
# LEARNING EXPERIMENT
# =============================================================================

def _require_unit_interval(spec: LossSpec, y_outcomes) -> None:
    alpha, beta = loss_interval(spec, y_outcomes)
    if alpha < 0.0 or beta > 1.0:
        raise ValidationException("Loss must take values in [0, 1]", details={"range": [alpha, beta]})


def expfam_learning_experiment(
    Pj: JointDiscrete,
    fam: ExpFamily,
    spec: LossSpec,
    n_grid: Sequence[int],
    trials: int,
    seed: int,
    runner: Optional[TrialRunner] = None,
) -> ExperimentResult:
    """
    Excess risk of the plug-in rule psi_{Q_hat} against the projection bound.

    Z = X x Y is ``Pj`` flattened row-major and must be the family's support.
    Each trial draws n samples, fits theta_hat by moment matching, and checks
    the pointwise bound 2 tv(P, Q*) + sqrt(2 (|mu| |dtheta| + |dA|)) together
    with the Pinsker step tv(Q*, Q_hat) <= sqrt(D(Q* || Q_hat) / 2). Samples
    whose moments fall on the boundary are redrawn from the next attempt
    stream, at most ``MAX_RESAMPLES`` times.

    Summary columns per n: approx_term, estim_term (expectations inside the
    root), median_estim_term (pointwise), corollary_bound, mean_excess,
    mean_pinsker_term, resamples.
    """
    P = Pj.flatten()
    if P.outcomes != fam.outcomes:
        raise ValidationException("Family support must be the flattened joint support (row-major X x Y)")
    _require_unit_interval(spec, Pj.y_outcomes)
    runner = runner or TrialRunner()

    mu = fam.moments(P)
    theta_star, Q_star = expfam_project(fam, P)
    a_star = expfam_logpartition(fam, theta_star)
    mu_norm = float(np.linalg.norm(mu))
    approx = 2.0 * tv(P, Q_star)
    h_p, _ = conditional_entropy(Pj, spec)
    logger.info("expfam projection: approximation term %.6g, theta* %s", approx, np.round(theta_star, 6).tolist())

    def one_trial(t: int, n: int) -> dict:
        for attempt in range(settings.MAX_RESAMPLES + 1):
            P_hat = empirical_from_indices(sample_indices(P, n, rng_for(seed, t, attempt)), P.outcomes)
            mu_hat = fam.moments(P_hat)
            if interior_margin(fam, mu_hat) > BOUNDARY_MARGIN:
                break
        else:
            raise NonConvergenceException(
                "Every resample had boundary moments", details={"n": n, "trial": t, "attempts": settings.MAX_RESAMPLES + 1}
            )
        theta_hat, Q_hat = expfam_project(fam, mu_hat)
        _, psi = conditional_entropy(JointDiscrete.from_flat(Q_hat, Pj.x_outcomes, Pj.y_outcomes), spec)
        excess = rule_risk(Pj, spec, psi) - h_p

        d_theta = float(np.linalg.norm(theta_star - theta_hat))
        d_a = abs(a_star - expfam_logpartition(fam, theta_hat))
        estim = math.sqrt(2.0 * (mu_norm * d_theta + d_a))
        divergence = kl(Q_star, Q_hat)
        pinsker = math.sqrt(2.0 * divergence)
        if excess > approx + estim + 1e-9 or tv(Q_star, Q_hat) > math.sqrt(0.5 * divergence) + 1e-12:
            raise BoundViolationException(
                "Plug-in excess exceeds the projection bound",
                details={"excess": excess, "approx": approx, "estim": estim, "n": n, "trial": t},
            )
        return {
            "n": n,
            "excess_risk": excess,
            "d_theta": d_theta,
            "d_logpartition": d_a,
            "estim_pointwise": estim,
            "pinsker_term": pinsker,
            "tv_to_truth": tv(P, Q_hat),
            "resamples": attempt,
        }

    rows, summary = [], []
    for block, n in enumerate(n_grid):
        frame = pd.DataFrame(runner.run(lambda t, n=n: one_trial(t, n), trials, f"expfam n={n}", block * trials))
        frame.insert(1, "trial", np.arange(trials))
        rows.append(frame)
        estim = math.sqrt(2.0 * (mu_norm * frame["d_theta"].mean() + frame["d_logpartition"].mean()))
        summary.append(
            {
                "n": n,
                "approx_term": approx,
                "estim_term": estim,
                "median_estim_term": float(frame["estim_pointwise"].median()),
                "corollary_bound": approx + estim,
                "mean_excess": float(frame["excess_risk"].mean()),
                "mean_pinsker_term": float(frame["pinsker_term"].mean()),
                "resamples": int(frame["resamples"].sum()),
            }
        )
        if summary[-1]["resamples"]:
            logger.warning("expfam n=%d: %d boundary samples redrawn", n, summary[-1]["resamples"])

    return ExperimentResult(pd.DataFrame(summary), pd.concat(rows, ignore_index=True))
