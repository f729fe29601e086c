"""
Tests for the Bayesian minimum-excess-risk experiments.
"""

import math

import numpy as np
import pytest

from entropy_bounds.core.exceptions import ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist
from entropy_bounds.learning.bayesian_mer import (
    GridRegressionModel,
    LinearGaussianModel,
    gaussian_grid_prior,
    grid_posterior,
    kl_route_bound,
    mer_linear,
    mer_nonlinear_bound,
    smoothness_constant,
    theorem_bound,
)

DESIGN = DiscreteDist.uniform((-1.0, -0.5, 0.0, 0.5, 1.0))
W_GRID = np.linspace(-2.0, 2.0, 81)


# =============================================================================
# LINEAR-GAUSSIAN
# =============================================================================

class TestLinearGaussian:
    """Tests for closed-form posterior MER."""

    @pytest.mark.parametrize("n", [1, 5, 50])
    def test_scalar_mer(self, n, serial_runner):
        """Test that the scalar model has MER = H_2 = 1 / (n + 1)."""
        result = mer_linear(LinearGaussianModel.scalar(), [n], trials=3, seed=0, runner=serial_runner)
        row = result.summary.iloc[0]
        assert row["mer"] == pytest.approx(1.0 / (n + 1))
        assert row["h2"] == pytest.approx(1.0 / (n + 1))
        assert row["theorem_bound"] == pytest.approx(2.0 / math.sqrt(n + 1) + 2.0 / (n + 1))

    def test_posterior_matches_direct_inverse(self):
        model = LinearGaussianModel.polynomial([-1.0, 0.0, 2.0], degree=2, prior_var=2.0, noise_var=0.5)
        rows = np.array([0, 2, 2, 1])
        phi = model.features[rows]
        direct = np.linalg.inv(np.eye(3) / 2.0 + phi.T @ phi / 0.5)
        np.testing.assert_allclose(model.posterior_cov(rows), direct, atol=1e-12)

    def test_mer_decreases_and_stays_below_relaxed_bound(self, serial_runner):
        model = LinearGaussianModel.polynomial(DESIGN.outcomes, degree=1)
        summary = mer_linear(model, [2, 10, 50], trials=10, seed=4, runner=serial_runner).summary
        assert summary["mer"].is_monotonic_decreasing
        assert (summary["mer"] <= summary["relaxed_bound"] + 1e-12).all()
        assert (summary["relaxed_bound"] <= summary["theorem_bound"]).all()

    def test_s_g2(self):
        model = LinearGaussianModel.polynomial([0.0, 2.0], degree=1)
        assert model.s_g2 == pytest.approx(0.5 * 1.0 + 0.5 * 5.0)

    def test_invalid_prior(self):
        with pytest.raises(ValidationException):
            LinearGaussianModel(np.array([[1.0, 2.0], [2.0, 1.0]]), np.ones((1, 2)), 1.0, DiscreteDist.uniform((0,)))

    def test_invalid_noise(self):
        with pytest.raises(ValidationException):
            LinearGaussianModel.scalar(noise_var=0.0)


class TestBoundFormulas:
    def test_theorem_bound(self):
        assert theorem_bound(1.0, 1.0, 0.25) == pytest.approx(1.0 + 0.5)

    def test_kl_route_bound(self):
        assert kl_route_bound(2.0, 0.25) == pytest.approx(4.0 * (0.5 + 0.25))


# =============================================================================
# GRID REGRESSION
# =============================================================================

class TestGridRegression:
    """Tests for exact grid posteriors and the smoothness bound."""

    def test_grid_validation(self):
        with pytest.raises(ValidationException):
            GridRegressionModel.from_function(lambda x, w: np.sin(w * x), DESIGN, [0.0, 1.0, 3.0])

    def test_smoothness_of_linear_g(self):
        """Test that g(x, w) = w x has s_g^2 = E X^2 from every difference scheme."""
        model = GridRegressionModel.from_function(lambda x, w: w * x, DESIGN, W_GRID)
        centered, forward, backward = smoothness_constant(model)
        assert centered == pytest.approx(0.5)
        assert forward == pytest.approx(0.5)
        assert backward == pytest.approx(0.5)

    def test_posterior_without_data_is_prior(self):
        prior = gaussian_grid_prior(W_GRID)
        model = GridRegressionModel.from_function(lambda x, w: w * x, DESIGN, W_GRID, prior=prior)
        weights = grid_posterior(model, np.array([], dtype=int), np.array([]))
        np.testing.assert_allclose(weights, prior, atol=1e-15)

    def test_constant_g_has_zero_mer(self, serial_runner):
        model = GridRegressionModel.from_function(lambda x, w: 0.0 * w + 1.0, DESIGN, W_GRID)
        summary = mer_nonlinear_bound(model, [5], trials=4, seed=1, runner=serial_runner).summary
        assert summary["mer"].iloc[0] == pytest.approx(0.0, abs=1e-15)
        assert summary["s_g2"].iloc[0] == 0.0
        assert bool(summary["bound_holds"].iloc[0])

    @pytest.mark.slow
    def test_sine_regression(self, serial_runner):
        model = GridRegressionModel.from_function(
            lambda x, w: np.sin(w * x), DESIGN, W_GRID, prior=gaussian_grid_prior(W_GRID)
        )
        summary = mer_nonlinear_bound(model, [5, 20, 80], trials=100, seed=2, runner=serial_runner).summary
        assert summary["bound_holds"].all()
        assert summary["lemma_chain_holds"].all()
        assert summary["mer"].is_monotonic_decreasing
