"""
Tests for CGF envelopes, their Legendre duals and generalized inverses.
"""

import math

import numpy as np
import pytest

from entropy_bounds.core.exceptions import ValidationException
from entropy_bounds.legendre.envelope import (
    CgfEnvelope,
    envelope_violation,
    generalized_inverse,
    kl_bound_from_cgf,
    legendre_dual,
)

X_GRID = np.linspace(0.0, 10.0, 101)


def _chi_square_dual(gamma: float, sigma2: float) -> float:
    return (math.sqrt(1.0 + 2.0 * gamma / sigma2) - 1.0) ** 2 / 4.0


# =============================================================================
# DUALS
# =============================================================================

class TestLegendreDual:
    """Tests for phi*(gamma) against closed forms."""

    @pytest.mark.parametrize("sigma2", [0.5, 1.0, 2.0])
    def test_subgaussian(self, sigma2):
        env = CgfEnvelope.subgaussian(sigma2)
        for gamma in (0.0, 0.1, 1.0, 5.0):
            assert legendre_dual(env, gamma) == pytest.approx(gamma ** 2 / (2.0 * sigma2), abs=1e-8)

    @pytest.mark.parametrize("sigma2", [0.5, 1.0, 2.0])
    def test_chi_square(self, sigma2):
        env = CgfEnvelope.chi_square(sigma2)
        for gamma in (0.0, 0.3, 2.0, 10.0):
            assert legendre_dual(env, gamma) == pytest.approx(_chi_square_dual(gamma, sigma2), abs=1e-8)

    def test_zero_envelope_has_infinite_dual(self):
        """Test that phi = 0 on [0, inf) gives phi*(gamma) = inf for gamma > 0."""
        env = CgfEnvelope.subgaussian(0.0)
        assert legendre_dual(env, 1.0) == math.inf
        assert legendre_dual(env, 0.0) == 0.0


# =============================================================================
# GENERALIZED INVERSES
# =============================================================================

class TestGeneralizedInverse:
    """Tests for phi*^{-1}(x) against closed forms over x in [0, 10]."""

    def test_subgaussian_closed_form(self):
        env = CgfEnvelope.subgaussian(1.0)
        for x in X_GRID:
            assert generalized_inverse(env, float(x)) == pytest.approx(math.sqrt(2.0 * x), abs=1e-6)

    def test_chi_square_closed_form(self):
        env = CgfEnvelope.chi_square(1.0)
        for x in X_GRID:
            assert generalized_inverse(env, float(x)) == pytest.approx(2.0 * (math.sqrt(x) + x), abs=1e-6)

    def test_zero_at_zero(self):
        assert generalized_inverse(CgfEnvelope.chi_square(2.0), 0.0) == pytest.approx(0.0, abs=1e-9)

    def test_exact_envelope_zero_at_zero(self):
        """Test that the exact CGF of a loss gives exactly 0 at zero divergence."""
        env = CgfEnvelope.exact(np.array([0.0, 1.0, 1.0]), np.array([0.2, 0.5, 0.3]))
        assert generalized_inverse(env, 0.0) == 0.0
        assert kl_bound_from_cgf(env, 0.0) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(ValidationException):
            generalized_inverse(CgfEnvelope.subgaussian(1.0), -0.1)

    def test_zero_envelope_inverse_is_zero(self):
        assert generalized_inverse(CgfEnvelope.subgaussian(0.0), 1.0) == pytest.approx(0.0, abs=1e-9)


class TestKlBoundFromCgf:
    def test_values(self):
        env = CgfEnvelope.subgaussian(2.0)
        assert kl_bound_from_cgf(env, 0.0) == pytest.approx(0.0, abs=1e-9)
        assert kl_bound_from_cgf(env, 1.0) == pytest.approx(2.0, abs=1e-6)
        assert kl_bound_from_cgf(env, math.inf) == math.inf

    def test_chi_square_value(self):
        assert kl_bound_from_cgf(CgfEnvelope.chi_square(1.0), 0.125) == pytest.approx(0.9571, abs=1e-4)

    def test_exact_envelope_is_tighter(self):
        """Test that the exact CGF of a fair coin gives a smaller bound than Hoeffding's."""
        values, probs = np.array([0.0, 1.0]), np.array([0.5, 0.5])
        exact = kl_bound_from_cgf(CgfEnvelope.exact(values, probs), 0.2)
        hoeffding = kl_bound_from_cgf(CgfEnvelope.subgaussian(0.25), 0.2)
        assert exact <= hoeffding + 1e-9


# =============================================================================
# ENVELOPE CONSTRUCTION AND CHECKS
# =============================================================================

class TestEnvelopes:
    """Tests for presets, tables and the grid check."""

    def test_hoeffding_envelope_holds(self):
        assert envelope_violation(CgfEnvelope.subgaussian(0.25), np.array([0.0, 1.0]), np.array([0.5, 0.5])) is None

    def test_too_small_proxy_violated(self):
        lam = envelope_violation(CgfEnvelope.subgaussian(0.01), np.array([0.0, 1.0]), np.array([0.5, 0.5]))
        assert lam is not None and lam > 0

    def test_chi_square_domain(self):
        env = CgfEnvelope.chi_square(0.5)
        assert env.b == pytest.approx(1.0)
        assert env(np.array([1.5]))[0] == math.inf

    def test_table_envelope(self):
        env = CgfEnvelope.from_table([0.0, 1.0, 2.0], [0.0, 0.5, 2.0])
        assert env.b == 2.0
        assert env(np.array([0.5]))[0] == pytest.approx(0.25)

    @pytest.mark.parametrize(
        "lambdas,values",
        [([0.5, 1.0], [0.0, 1.0]), ([0.0, 0.0], [0.0, 1.0]), ([0.0], [0.0])],
    )
    def test_table_validation(self, lambdas, values):
        with pytest.raises(ValidationException):
            CgfEnvelope.from_table(lambdas, values)

    def test_preset_validation(self):
        with pytest.raises(ValidationException):
            CgfEnvelope.subgaussian(-1.0)
        with pytest.raises(ValidationException):
            CgfEnvelope.chi_square(0.0)

    def test_describe(self):
        assert CgfEnvelope.subgaussian(1.0).describe() == "subgaussian(sigma2=1)"
