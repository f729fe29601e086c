"""
Bayesian Minimum Excess Risk
============================

Under quadratic loss the minimum excess risk (MER) of Bayesian learning is
the posterior variance of the regression function at a fresh X, averaged
over data sets:

    MER = E[ Var(g(X, W) | X, Z^n) ]

For Y = g(X, W) + N(0, sigma^2) with s_g^2 = E_X sup_w |grad_w g(X, w)|^2
and H_2 = E[tr Cov(W | Z^n)] it is bounded by

    MER <= sqrt(4 sigma^2 s_g^2 H_2) + 2 s_g^2 H_2

and, for linear g, directly by s_g^2 H_2.

Two models:
- ``LinearGaussianModel``: g(x, w) = phi(x) . w with a Gaussian prior; the
  posterior covariance is closed form and does not depend on Y.
- ``GridRegressionModel``: scalar w on a finite grid with a tabulated g; the
  posterior is exact on the grid.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.special import logsumexp
from scipy.stats import norm

from entropy_bounds.core.exceptions import BoundViolationException, ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist
from entropy_bounds.distributions.sampling import rng_for, sample_indices
from entropy_bounds.experiments.runner import ExperimentResult, TrialRunner

logger = logging.getLogger(__name__)

MER_TOL = 1e-10
FINITE_DIFFERENCE_DRIFT = 0.10


def theorem_bound(noise_var: float, s_g2: float, h2: float) -> float:
    """sqrt(4 sigma^2 s_g^2 H_2) + 2 s_g^2 H_2."""
    return math.sqrt(4.0 * noise_var * s_g2 * h2) + 2.0 * s_g2 * h2


def kl_route_bound(noise_var: float, divergence: float) -> float:
    """2 sigma^2 (sqrt(D) + D) for D the expected KL between posterior draws."""
    return 2.0 * noise_var * (math.sqrt(divergence) + divergence)


def _require_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ValidationException(f"{name} must be positive", details={name: value})


# =============================================================================
# LINEAR-GAUSSIAN MODEL
# =============================================================================

@dataclass(frozen=True, eq=False)
class LinearGaussianModel:
    """
    Y = phi(X) . W + N(0, noise_var), W ~ N(0, prior_cov), X ~ design.

    Attributes:
        prior_cov: d x d symmetric positive definite prior covariance.
        features: |X| x d table of phi(x), rows in design order.
        noise_var: Observation noise variance sigma^2.
        design: Finite distribution of X.
    """

    prior_cov: np.ndarray
    features: np.ndarray
    noise_var: float
    design: DiscreteDist

    def __post_init__(self):
        prior_cov = np.atleast_2d(np.array(self.prior_cov, dtype=float))
        features = np.array(self.features, dtype=float)
        if features.ndim == 1:
            features = features[:, None]
        d = prior_cov.shape[0]
        if prior_cov.shape != (d, d) or not np.allclose(prior_cov, prior_cov.T):
            raise ValidationException("Prior covariance must be a symmetric square matrix")
        if features.shape != (len(self.design), d):
            raise ValidationException(
                "Feature table must have one row per design point and d columns",
                details={"shape": list(features.shape), "expected": [len(self.design), d]},
            )
        _require_positive("noise_var", self.noise_var)
        try:
            cho_factor(prior_cov)
        except LinAlgError as exc:
            raise ValidationException("Prior covariance is not positive definite") from exc
        object.__setattr__(self, "prior_cov", prior_cov)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "noise_var", float(self.noise_var))

    @classmethod
    def scalar(cls, prior_var: float = 1.0, noise_var: float = 1.0) -> "LinearGaussianModel":
        """phi = 1 on a single design point: posterior variance 1 / (1/prior_var + n/noise_var)."""
        return cls(np.array([[prior_var]]), np.ones((1, 1)), noise_var, DiscreteDist.uniform((0,)))

    @classmethod
    def polynomial(
        cls, x_values: Sequence[float], degree: int = 1, prior_var: float = 1.0, noise_var: float = 1.0
    ) -> "LinearGaussianModel":
        """phi(x) = (1, x, ..., x^degree) on a uniform design."""
        x = np.asarray(x_values, dtype=float)
        features = np.vander(x, degree + 1, increasing=True)
        return cls(prior_var * np.eye(degree + 1), features, noise_var, DiscreteDist.uniform(tuple(x.tolist())))

    @property
    def s_g2(self) -> float:
        """E ||phi(X)||^2."""
        return float(self.design.probs @ np.sum(self.features ** 2, axis=1))

    def posterior_cov(self, design_rows: np.ndarray) -> np.ndarray:
        """(Sigma_W^-1 + Phi^T Phi / sigma^2)^-1 for the sampled feature rows."""
        phi = self.features[design_rows]
        d = self.prior_cov.shape[0]
        prior_precision = cho_solve(cho_factor(self.prior_cov), np.eye(d))
        precision = prior_precision + phi.T @ phi / self.noise_var
        return cho_solve(cho_factor(precision), np.eye(d))

    def mer(self, cov: np.ndarray) -> float:
        """sum_x P_X(x) phi(x)^T cov phi(x)."""
        return float(self.design.probs @ np.einsum("ij,jk,ik->i", self.features, cov, self.features))


def mer_linear(
    model: LinearGaussianModel,
    n_grid: Sequence[int],
    trials: int,
    seed: int,
    runner: Optional[TrialRunner] = None,
) -> ExperimentResult:
    """
    MER and its bounds for the linear-Gaussian model.

    Each trial draws a design of size n and computes the exact posterior
    covariance. Summary columns per n: mer, h2, s_g2, relaxed_bound
    (s_g^2 H_2), theorem_bound.

    Raises:
        BoundViolationException: a trial's MER exceeds s_g^2 tr(Sigma_n).
    """
    runner = runner or TrialRunner()
    s_g2 = model.s_g2

    def one_trial(t: int, n: int) -> dict:
        rows = sample_indices(model.design, n, rng_for(seed, t))
        cov = model.posterior_cov(rows)
        mer, h2 = model.mer(cov), float(np.trace(cov))
        if mer > s_g2 * h2 + MER_TOL:
            raise BoundViolationException("MER exceeds s_g^2 H_2 on a trial", details={"mer": mer, "h2": h2, "n": n})
        return {"n": n, "mer": mer, "h2": h2}

    rows, summary = [], []
    for block, n in enumerate(n_grid):
        frame = pd.DataFrame(runner.run(lambda t, n=n: one_trial(t, n), trials, f"mer_linear n={n}", block * trials))
        frame.insert(1, "trial", np.arange(trials))
        rows.append(frame)
        mer, h2 = float(frame["mer"].mean()), float(frame["h2"].mean())
        summary.append(
            {
                "n": n,
                "mer": mer,
                "h2": h2,
                "s_g2": s_g2,
                "relaxed_bound": s_g2 * h2,
                "theorem_bound": theorem_bound(model.noise_var, s_g2, h2),
            }
        )
        logger.info("mer_linear n=%d: MER %.6g, H2 %.6g", n, mer, h2)

    return ExperimentResult(pd.DataFrame(summary), pd.concat(rows, ignore_index=True))


# =============================================================================
# NONLINEAR REGRESSION ON A PARAMETER GRID
# =============================================================================

def gaussian_grid_prior(w_grid: Sequence[float], mean: float = 0.0, var: float = 1.0) -> np.ndarray:
    """N(mean, var) density on the grid, normalized to sum 1."""
    _require_positive("var", var)
    weights = norm.pdf(np.asarray(w_grid, dtype=float), loc=mean, scale=math.sqrt(var))
    return weights / weights.sum()


@dataclass(frozen=True, eq=False)
class GridRegressionModel:
    """
    Y = g(X, W) + N(0, noise_var) with scalar W on an equispaced grid.

    Attributes:
        design: Finite distribution of real X.
        w_grid: Increasing equispaced parameter grid.
        prior: Prior weights on the grid.
        table: |X| x |grid| values g(x, w).
        noise_var: Observation noise variance sigma^2.
    """

    design: DiscreteDist
    w_grid: np.ndarray
    prior: np.ndarray
    table: np.ndarray
    noise_var: float

    def __post_init__(self):
        w_grid = np.array(self.w_grid, dtype=float)
        prior = np.array(self.prior, dtype=float)
        table = np.array(self.table, dtype=float)
        if w_grid.ndim != 1 or w_grid.size < 3:
            raise ValidationException("Parameter grid needs at least three points")
        steps = np.diff(w_grid)
        if not np.all(steps > 0) or not np.allclose(steps, steps[0]):
            raise ValidationException("Parameter grid must be increasing and equispaced")
        if prior.shape != w_grid.shape or np.any(prior < 0) or not math.isclose(prior.sum(), 1.0, abs_tol=1e-12):
            raise ValidationException("Prior must be a probability vector over the grid")
        if table.shape != (len(self.design), w_grid.size):
            raise ValidationException(
                "g table must be |X| x |grid|", details={"shape": list(table.shape), "expected": [len(self.design), w_grid.size]}
            )
        _require_positive("noise_var", self.noise_var)
        object.__setattr__(self, "w_grid", w_grid)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "noise_var", float(self.noise_var))

    @classmethod
    def from_function(
        cls,
        g: Callable[[np.ndarray, np.ndarray], np.ndarray],
        design: DiscreteDist,
        w_grid: Sequence[float],
        prior: Optional[Sequence[float]] = None,
        noise_var: float = 1.0,
    ) -> "GridRegressionModel":
        """Tabulate a vectorized g(x, w) on design x grid; uniform prior by default."""
        w = np.asarray(w_grid, dtype=float)
        table = g(design.values()[:, None], w[None, :]) * np.ones((len(design), w.size))
        prior = np.full(w.size, 1.0 / w.size) if prior is None else prior
        return cls(design, w, prior, table, noise_var)

    @property
    def step(self) -> float:
        return float(self.w_grid[1] - self.w_grid[0])


def smoothness_constant(model: GridRegressionModel) -> Tuple[float, float, float]:
    """
    s_g^2 = E_X sup_w (dg/dw)^2 by finite differences with the grid step.

    Returns:
        (centered, forward, backward) estimates. The centered one (one-sided at
        the grid ends) is the one used in bounds.
    """
    g, h = model.table, model.step
    forward = np.diff(g, axis=1) / h
    centered = np.gradient(g, h, axis=1)

    def expected_sup(slopes: np.ndarray) -> float:
        return float(model.design.probs @ np.max(slopes ** 2, axis=1))

    return expected_sup(centered), expected_sup(forward[:, 1:]), expected_sup(forward[:, :-1])


def grid_posterior(model: GridRegressionModel, x_indices: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Exact posterior weights of W on the grid given (X_i, Y_i)."""
    with np.errstate(divide="ignore"):
        log_post = np.log(model.prior)
    residuals = np.asarray(y, dtype=float)[:, None] - model.table[np.asarray(x_indices)]
    log_post = log_post - np.sum(residuals ** 2, axis=0) / (2.0 * model.noise_var)
    return np.exp(log_post - logsumexp(log_post))


def _posterior_summary(model: GridRegressionModel, weights: np.ndarray) -> Tuple[float, float]:
    """(MER = sum_x P_X(x) Var(g(x, W)), H_2 = Var(W)) under posterior weights."""
    g_mean = model.table @ weights
    g_var = (model.table - g_mean[:, None]) ** 2 @ weights
    w_mean = float(weights @ model.w_grid)
    return float(model.design.probs @ g_var), float(weights @ (model.w_grid - w_mean) ** 2)


def mer_nonlinear_bound(
    model: GridRegressionModel,
    n_grid: Sequence[int],
    trials: int,
    seed: int,
    runner: Optional[TrialRunner] = None,
) -> ExperimentResult:
    """
    Monte Carlo MER with exact grid posteriors against the smoothness bound.

    Each trial draws W from the prior, n design points and noisy responses,
    then computes the posterior MER and H_2. Per n the summary reports mer,
    h2, s_g2 (centered), expected_kl = mer / sigma^2 next to its bound
    s_g2 h2 / sigma^2 (``lemma_chain_holds``), theorem_bound,
    kl_route_bound and ``bound_holds``.
    """
    runner = runner or TrialRunner()
    s_g2, s_forward, s_backward = smoothness_constant(model)
    for label, estimate in (("forward", s_forward), ("backward", s_backward)):
        if s_g2 > 0 and abs(estimate - s_g2) > FINITE_DIFFERENCE_DRIFT * s_g2:
            logger.warning(
                "s_g^2 unstable on this grid: centered %.6g, forward %.6g, backward %.6g (%s drifts)",
                s_g2,
                s_forward,
                s_backward,
                label,
            )
            break

    def one_trial(t: int, n: int) -> dict:
        rng = rng_for(seed, t)
        w_index = rng.choice(model.w_grid.size, p=model.prior)
        x_indices = sample_indices(model.design, n, rng)
        y = model.table[x_indices, w_index] + rng.normal(0.0, math.sqrt(model.noise_var), size=n)
        mer, h2 = _posterior_summary(model, grid_posterior(model, x_indices, y))
        return {"n": n, "w_true": float(model.w_grid[w_index]), "mer": mer, "h2": h2}

    rows, summary = [], []
    for block, n in enumerate(n_grid):
        frame = pd.DataFrame(runner.run(lambda t, n=n: one_trial(t, n), trials, f"mer_nonlinear n={n}", block * trials))
        frame.insert(1, "trial", np.arange(trials))
        rows.append(frame)
        mer, h2 = float(frame["mer"].mean()), float(frame["h2"].mean())
        expected_kl = mer / model.noise_var
        chain_bound = s_g2 * h2 / model.noise_var
        bound = theorem_bound(model.noise_var, s_g2, h2)
        entry = {
            "n": n,
            "mer": mer,
            "h2": h2,
            "s_g2": s_g2,
            "s_g2_forward": s_forward,
            "s_g2_backward": s_backward,
            "expected_kl": expected_kl,
            "kl_chain_bound": chain_bound,
            "lemma_chain_holds": bool(expected_kl <= chain_bound + MER_TOL),
            "theorem_bound": bound,
            "kl_route_bound": kl_route_bound(model.noise_var, expected_kl),
            "bound_holds": bool(mer <= bound + MER_TOL),
        }
        if not entry["bound_holds"]:
            logger.warning("mer_nonlinear n=%d: MC MER %.6g above bound %.6g", n, mer, bound)
        summary.append(entry)

    return ExperimentResult(pd.DataFrame(summary), pd.concat(rows, ignore_index=True))
