"""
Tests for generalized entropy, conditional entropy and Bayes rules.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from scipy.stats import entropy as shannon

from entropy_bounds.core.exceptions import NotApplicableException, UndefinedConditionalException, ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist, JointDiscrete
from entropy_bounds.distributions.gaussian import GaussianMixture, GaussianScalar
from entropy_bounds.entropy.generalized import (
    argmax_tiebreak,
    argmin_tiebreak,
    conditional_entropy,
    expected_loss,
    generalized_entropy,
    rule_risk,
)
from entropy_bounds.losses.loss_spec import LossSpec
from entropy_bounds.tests.strategies import prob_vectors, unit_tables


# =============================================================================
# TIE-BREAKING
# =============================================================================

class TestTieBreak:
    @pytest.mark.parametrize("values,expected", [((1, 3, 3), 1), ((2,), 0), ((0, 0, 0), 0)])
    def test_argmax_lowest_index(self, values, expected):
        assert argmax_tiebreak(values) == expected

    def test_argmin_lowest_index(self):
        assert argmin_tiebreak((2, 1, 1)) == 1

    def test_empty_rejected(self):
        with pytest.raises(ValidationException):
            argmax_tiebreak(())


# =============================================================================
# UNCONDITIONAL ENTROPY
# =============================================================================

class TestGeneralizedEntropy:
    """Tests for H(P) and a_P under each canonical loss."""

    def test_zero_one(self, zero_one):
        """Test that zero-one entropy is 1 - max P with the first argmax."""
        P = DiscreteDist(("a", "b", "c"), np.array([0.5, 0.3, 0.2]))
        result = generalized_entropy(P, zero_one)
        assert result.value == pytest.approx(0.5)
        assert result.optimal_action == "a"

    def test_quadratic_fair_coin(self):
        result = generalized_entropy(DiscreteDist.bernoulli(0.5), LossSpec("quadratic"))
        assert result.value == pytest.approx(0.25)
        assert result.optimal_action == pytest.approx(0.5)

    def test_log_loss_is_shannon(self, three_point, log_loss):
        result = generalized_entropy(three_point, log_loss)
        assert result.value == pytest.approx(shannon(three_point.probs))
        assert result.optimal_action is three_point

    def test_absolute_uses_median(self):
        P = DiscreteDist((0.0, 1.0, 5.0), np.array([0.3, 0.4, 0.3]))
        result = generalized_entropy(P, LossSpec("absolute"))
        assert result.optimal_action == 1.0
        assert result.value == pytest.approx(0.3 * 1.0 + 0.3 * 4.0)

    def test_table_brute_force(self, small_table):
        P = DiscreteDist.bernoulli(0.5)
        result = generalized_entropy(P, small_table)
        assert result.value == pytest.approx(min(0.3, 0.5))
        assert result.optimal_action == 0

    def test_gaussian_differential_entropy(self, log_loss):
        result = generalized_entropy(GaussianScalar(3.0, 1.0), log_loss)
        assert result.value == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-12)

    def test_gaussian_quadratic_is_variance(self):
        assert generalized_entropy(GaussianScalar(0.0, 2.5), LossSpec("quadratic")).value == pytest.approx(2.5)

    def test_mixture_entropy_between_bounds(self, log_loss):
        """Test that a two-component mixture has entropy between a component's and component's + log 2."""
        M = GaussianMixture(np.array([0.5, 0.5]), np.array([-3.0, 3.0]), np.array([1.0, 1.0]))
        component = 0.5 * math.log(2 * math.pi * math.e)
        value = generalized_entropy(M, log_loss).value
        assert component < value <= component + math.log(2) + 1e-9

    def test_gaussian_table_loss_not_applicable(self, small_table):
        with pytest.raises(NotApplicableException):
            generalized_entropy(GaussianScalar(0.0, 1.0), small_table)

    @given(prob_vectors(3, 3), unit_tables(rows=3))
    def test_value_is_expected_loss_of_action(self, probs, table):
        """Test that H(P) equals the expected loss of a_P and lower-bounds every action."""
        P = DiscreteDist((0, 1, 2), probs)
        spec = LossSpec("table", table=table)
        result = generalized_entropy(P, spec)
        assert expected_loss(P, spec, result.optimal_action) == pytest.approx(result.value, abs=1e-10)
        for a in spec.actions:
            assert result.value <= expected_loss(P, spec, a) + 1e-12

    @given(prob_vectors(2, 5))
    def test_zero_one_point_mass_and_bounds(self, probs):
        P = DiscreteDist(tuple(range(len(probs))), probs)
        value = generalized_entropy(P, LossSpec("zero-one")).value
        assert 0.0 <= value <= 1.0 - 1.0 / len(probs) + 1e-12


# =============================================================================
# CONDITIONAL ENTROPY
# =============================================================================

class TestConditionalEntropy:
    """Tests for the Bayes risk and the Bayes rule."""

    def test_map_rule(self, diagonal_joint, zero_one):
        """Test that the zero-one Bayes risk of the diagonal joint is 0.2 with rule x -> x."""
        value, rule = conditional_entropy(diagonal_joint, zero_one)
        assert value == pytest.approx(0.2)
        assert rule(0) == 0 and rule(1) == 1

    def test_independent_joint(self, independent_joint, zero_one):
        value, _ = conditional_entropy(independent_joint, zero_one)
        assert value == pytest.approx(generalized_entropy(independent_joint.marginal_y(), zero_one).value)

    def test_deterministic_labels(self, zero_one):
        j = JointDiscrete((0, 1), ("a", "b"), np.array([[0.6, 0.0], [0.0, 0.4]]))
        assert conditional_entropy(j, zero_one)[0] == pytest.approx(0.0)

    def test_zero_mass_row_skipped(self, zero_one):
        j = JointDiscrete((0, 1, 2), (0, 1), np.array([[0.3, 0.2], [0.0, 0.0], [0.1, 0.4]]))
        value, rule = conditional_entropy(j, zero_one)
        assert value == pytest.approx(0.2 + 0.1)
        assert not rule.is_defined(1)
        with pytest.raises(UndefinedConditionalException):
            rule(1)

    def test_bayes_rule_risk_equals_entropy(self, diagonal_joint, small_table):
        value, rule = conditional_entropy(diagonal_joint, small_table)
        assert rule_risk(diagonal_joint, small_table, rule) == pytest.approx(value)
