"""
Tests for finite and Gaussian distributions and seeded sampling.
"""

import numpy as np
import pytest
from hypothesis import given

from entropy_bounds.core.exceptions import UndefinedConditionalException, ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist, JointDiscrete
from entropy_bounds.distributions.gaussian import GaussianMixture, GaussianScalar
from entropy_bounds.distributions.sampling import empirical, rng_for, sample
from entropy_bounds.tests.strategies import prob_vectors


# =============================================================================
# DISCRETE DISTRIBUTIONS
# =============================================================================

class TestDiscreteDist:
    """Tests for DiscreteDist validation and accessors."""

    def test_valid_distribution(self, three_point):
        """Test that probabilities are stored read-only and looked up by label."""
        assert three_point.prob("b") == pytest.approx(0.3)
        assert not three_point.probs.flags.writeable
        assert len(three_point) == 3

    @pytest.mark.parametrize(
        "probs",
        [[0.5, 0.6], [-0.1, 1.1], [np.nan, 1.0], [0.5, 0.5 - 1e-9]],
    )
    def test_invalid_probabilities_rejected(self, probs):
        """Test that negative, non-finite or unnormalized vectors raise."""
        with pytest.raises(ValidationException):
            DiscreteDist((0, 1), np.array(probs))

    def test_renormalizes_within_tolerance(self):
        """Test that a deviation below 1e-12 is absorbed."""
        P = DiscreteDist((0, 1), np.array([0.5, 0.5 + 1e-13]))
        assert P.probs.sum() == pytest.approx(1.0, abs=1e-15)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValidationException):
            DiscreteDist((0, 0), np.array([0.5, 0.5]))

    def test_list_labels_are_frozen(self):
        """Test that JSON-style list labels become hashable tuples."""
        P = DiscreteDist.from_dict({"outcomes": [[0, 1], [1, 0]], "probs": [0.25, 0.75]})
        assert P.prob((1, 0)) == pytest.approx(0.75)
        assert P.to_dict()["outcomes"] == [[0, 1], [1, 0]]

    def test_missing_key_rejected(self):
        with pytest.raises(ValidationException):
            DiscreteDist.from_dict({"outcomes": [0, 1]})

    def test_moments(self):
        P = DiscreteDist((0, 1, 2), np.array([0.25, 0.5, 0.25]))
        assert P.mean() == pytest.approx(1.0)
        assert P.variance() == pytest.approx(0.5)
        assert P.second_moment() == pytest.approx(1.5)

    def test_values_need_numeric_labels(self, three_point):
        with pytest.raises(ValidationException):
            three_point.values()

    def test_reorder_pads_with_zero_mass(self):
        """Test that reorder maps onto a superset support."""
        P = DiscreteDist.bernoulli(0.3).reorder((1, 2, 0))
        np.testing.assert_allclose(P.probs, [0.3, 0.0, 0.7])
        with pytest.raises(ValidationException):
            DiscreteDist.bernoulli(0.3).reorder((1, 2))

    def test_mix(self):
        P = DiscreteDist.point_mass((0, 1), 0).mix(DiscreteDist.point_mass((0, 1), 1), 0.25)
        np.testing.assert_allclose(P.probs, [0.25, 0.75])

    def test_bernoulli_range(self):
        with pytest.raises(ValidationException):
            DiscreteDist.bernoulli(1.5)

    @given(prob_vectors())
    def test_any_normalized_vector_accepted(self, probs):
        """Test that normalized nonnegative vectors always construct."""
        P = DiscreteDist(tuple(range(len(probs))), probs)
        assert P.probs.sum() == pytest.approx(1.0, abs=1e-12)


# =============================================================================
# JOINT DISTRIBUTIONS
# =============================================================================

class TestJointDiscrete:
    """Tests for JointDiscrete marginals and conditionals."""

    def test_marginals(self, diagonal_joint):
        p_x, p_y, family = diagonal_joint.marginals()
        np.testing.assert_allclose(p_x.probs, [0.5, 0.5])
        np.testing.assert_allclose(p_y.probs, [0.5, 0.5])
        np.testing.assert_allclose(family[0].probs, [0.8, 0.2])

    def test_zero_mass_conditional_undefined(self):
        """Test that conditioning on a zero-mass x raises a typed error."""
        j = JointDiscrete((0, 1), (0, 1), np.array([[0.5, 0.5], [0.0, 0.0]]))
        assert j.defined_rows() == [0]
        with pytest.raises(UndefinedConditionalException) as exc_info:
            j.conditional(1)
        assert exc_info.value.exit_code == 2

    def test_flatten_round_trip(self, independent_joint):
        flat = independent_joint.flatten()
        assert flat.outcomes[1] == (0, "v")
        back = JointDiscrete.from_flat(flat, independent_joint.x_outcomes, independent_joint.y_outcomes)
        np.testing.assert_allclose(back.probs, independent_joint.probs)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationException):
            JointDiscrete((0, 1), (0,), np.array([[0.5, 0.5]]))

    def test_from_rows(self):
        j = JointDiscrete.from_rows(DiscreteDist.bernoulli(0.5), np.array([[1.0, 0.0], [0.5, 0.5]]), ("a", "b"))
        np.testing.assert_allclose(j.probs, [[0.5, 0.0], [0.25, 0.25]])


# =============================================================================
# GAUSSIANS
# =============================================================================

class TestGaussians:
    def test_scalar_moments(self):
        G = GaussianScalar(1.0, 4.0)
        assert G.std == pytest.approx(2.0)
        assert G.second_moment() == pytest.approx(5.0)

    def test_nonpositive_variance_rejected(self):
        with pytest.raises(ValidationException):
            GaussianScalar(0.0, 0.0)

    def test_mixture_leaves_inputs_writable(self):
        means = np.array([-1.0, 1.0])
        variances = np.array([1.0, 2.0])
        M = GaussianMixture(np.array([0.5, 0.5]), means, variances)
        means[0] = 5.0
        variances[1] = 3.0
        assert M.means[0] == -1.0
        assert M.variances[1] == 2.0
        assert not M.means.flags.writeable

    def test_mixture_moments(self):
        M = GaussianMixture(np.array([0.5, 0.5]), np.array([-1.0, 1.0]), np.array([1.0, 1.0]))
        assert M.mean == pytest.approx(0.0)
        assert M.variance == pytest.approx(2.0)


# =============================================================================
# SAMPLING
# =============================================================================

class TestSampling:
    """Tests for seeded sample streams."""

    def test_same_seed_same_samples(self, three_point):
        assert sample(three_point, 50, seed=7, trial=3) == sample(three_point, 50, seed=7, trial=3)

    def test_trials_are_independent_streams(self, three_point):
        assert sample(three_point, 50, seed=7, trial=0) != sample(three_point, 50, seed=7, trial=1)

    def test_negative_seed_rejected(self):
        with pytest.raises(ValidationException):
            rng_for(-1)

    def test_joint_samples_are_pairs(self, diagonal_joint):
        draws = sample(diagonal_joint, 10, seed=0)
        assert all(pair in diagonal_joint.flatten().outcomes for pair in draws)

    def test_gaussian_samples(self):
        draws = sample(GaussianScalar(0.0, 1.0), 2000, seed=1)
        assert abs(np.mean(draws)) < 0.1

    def test_empirical_keeps_zero_counts(self):
        P_hat = empirical(["a", "a", "c", "a"], ("a", "b", "c"))
        np.testing.assert_allclose(P_hat.probs, [0.75, 0.0, 0.25])

    def test_empirical_rejects_foreign_samples(self):
        with pytest.raises(ValidationException):
            empirical(["z"], ("a", "b"))
