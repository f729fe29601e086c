"""
Tests for empirical risk minimization and its excess-risk guarantees.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropy_bounds.core.exceptions import ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist
from entropy_bounds.distributions.sampling import empirical_from_indices, rng_for, sample_indices
from entropy_bounds.divergence.f_divergences import tv
from entropy_bounds.divergence.transport import wasserstein1_discrete
from entropy_bounds.learning.erm import (
    binary_classification_curve,
    deviation_bound,
    erm,
    erm_from_empirical,
    erm_from_samples,
    erm_sweep,
    lipschitz_factor,
    lipschitz_grid_problem,
    lipschitz_rate_check,
    theorem_curve,
)
from entropy_bounds.losses.loss_spec import LossSpec
from entropy_bounds.tests.strategies import prob_vectors, unit_tables


# =============================================================================
# SINGLE RUNS
# =============================================================================

class TestErmRun:
    """Tests for one ERM fit against a known population."""

    def test_empirical_equals_population(self, zero_one):
        """Test that a sample reproducing P exactly gives zero excess risk."""
        P = DiscreteDist.uniform((0, 1, 2, 3))
        run = erm_from_samples(P, zero_one, [0, 1, 2, 3])
        assert run.excess_risk == 0.0
        assert run.tv_to_truth == pytest.approx(0.0)
        assert run.semidistance == pytest.approx(0.0)
        assert run.hypothesis == 0

    def test_single_action(self, three_point):
        spec = LossSpec("table", table=np.array([[0.2], [0.7], [0.1]]), outcomes=three_point.outcomes)
        run = erm(three_point, spec, n=10, seed=3)
        assert run.excess_risk == 0.0

    def test_wrong_majority(self, zero_one):
        P = DiscreteDist((0, 1), np.array([0.6, 0.4]))
        run = erm_from_samples(P, zero_one, [1, 1, 0])
        assert run.action == 1
        assert run.excess_risk == pytest.approx(0.2)
        assert run.excess_risk <= 2.0 * run.semidistance + 1e-12

    def test_needs_samples(self, coin_pair, zero_one):
        with pytest.raises(ValidationException):
            erm(coin_pair[0], zero_one, n=0, seed=1)

    def test_needs_finite_actions(self, coin_pair):
        with pytest.raises(ValidationException):
            erm(coin_pair[0], LossSpec("quadratic"), n=5, seed=1)

    def test_deterministic(self, three_point, zero_one):
        assert erm(three_point, zero_one, 25, seed=9, trial=4) == erm(three_point, zero_one, 25, seed=9, trial=4)

    def test_record(self, three_point, zero_one):
        record = erm(three_point, zero_one, 5, seed=1).to_record()
        assert set(record) >= {"n", "action", "excess_risk", "semidistance", "typical"}
        assert isinstance(record["action"], str)

    @given(prob_vectors(3, 3, floor=0.01), unit_tables(rows=3), st.integers(1, 40), st.integers(0, 10_000))
    def test_excess_within_twice_semidistance(self, probs, table, n, seed):
        P = DiscreteDist((0, 1, 2), probs)
        run = erm(P, LossSpec("table", table=table), n, seed)
        assert 0.0 <= run.excess_risk <= 2.0 * run.semidistance + 1e-10


# =============================================================================
# RATES
# =============================================================================

class TestCurves:
    def test_theorem_curve(self):
        assert theorem_curve(2, 200) == pytest.approx(0.1)

    def test_deviation_bound_capped(self):
        assert deviation_bound(4, 10, 0.1) == 1.0

    def test_deviation_bound_decays(self):
        assert deviation_bound(2, 10_000, 0.2) < 1e-50

    def test_binary_classification_curve(self):
        ours, rademacher = binary_classification_curve(4, 100)
        assert ours == pytest.approx(math.sqrt(0.08))
        assert ours < rademacher

    def test_lipschitz_factor(self):
        assert lipschitz_factor(0.5) == pytest.approx(2.0 * math.sqrt(2.0))
        assert lipschitz_factor(2.0, "squared", b=1.0) == pytest.approx(16.0 * math.sqrt(2.0))


class TestErmSweep:
    """Tests for the finite-Z Monte Carlo sweep."""

    def test_summary_columns(self, three_point, zero_one, serial_runner):
        result = erm_sweep(three_point, zero_one, [10, 40], trials=5, seed=1, epsilons=(0.1, 0.25), runner=serial_runner)
        assert list(result.summary["n"]) == [10, 40]
        for column in (
            "mean_excess",
            "mean_tv",
            "mean_semidistance",
            "theorem_curve",
            "typical_fraction",
            "exceed_0.1",
            "deviation_bound_0.25",
        ):
            assert column in result.summary.columns
        assert len(result.trials) == 10

    def test_rejects_loss_outside_unit_interval(self, three_point, serial_runner):
        spec = LossSpec("table", table=np.array([[0.0], [2.0], [1.0]]), outcomes=three_point.outcomes)
        with pytest.raises(ValidationException):
            erm_sweep(three_point, spec, [10], trials=2, seed=1, runner=serial_runner)

    @pytest.mark.slow
    def test_finite_z_theorem(self, serial_runner):
        """Test mean excess <= sqrt(2 / n) and exceedance at eps = 0.3 under the deviation bound."""
        rng = rng_for(12)
        P = DiscreteDist((0, 1), np.array([0.35, 0.65]))
        spec = LossSpec("table", table=rng.uniform(size=(2, 3)))
        result = erm_sweep(P, spec, [25, 100, 400, 1600], trials=500, seed=7, epsilons=(0.3,), runner=serial_runner)
        summary = result.summary
        assert (summary["mean_excess"] <= summary["theorem_curve"]).all()
        informative = summary["deviation_bound_0.3"] < 1.0
        assert (summary.loc[informative, "exceed_0.3"] <= summary.loc[informative, "deviation_bound_0.3"]).all()

    @pytest.mark.slow
    def test_empirical_tv_rate(self):
        """Test that mean d_TV(P_hat_n, P) decays like n^(-1/2) on eight outcomes."""
        P = DiscreteDist(tuple(range(8)), rng_for(3).dirichlet(np.ones(8)))
        grid = [16 * 4 ** i for i in range(5)]
        means = []
        for block, n in enumerate(grid):
            distances = [
                tv(empirical_from_indices(sample_indices(P, n, rng_for(19, block * 200 + t)), P.outcomes), P)
                for t in range(200)
            ]
            means.append(np.mean(distances))
        slope, _ = np.polyfit(np.log(grid), np.log(means), 1)
        assert -0.6 <= slope <= -0.4


# =============================================================================
# LIPSCHITZ LOSSES
# =============================================================================

class TestLipschitzGrid:
    """Tests for the grid regression problem and its Wasserstein rate."""

    def test_problem_shape(self):
        P, spec, metric, rho_f = lipschitz_grid_problem(p=2, x_points=3, y_levels=2, action_points=3)
        assert len(P) == 9 * 2
        assert metric.shape == (18, 18)
        assert len(spec.actions) == 9
        assert rho_f == pytest.approx(math.sqrt(2.0))

    def test_population_stream_apart_from_trials(self):
        """Test that P is not drawn from the same stream as the first sampling trial."""
        P, _, _, _ = lipschitz_grid_problem(p=2, x_points=3, y_levels=2, seed=4)
        first_trial = rng_for(4, 0).dirichlet(np.ones(len(P)))
        assert not np.allclose(P.probs, first_trial)

    def test_invalid_dimension(self):
        with pytest.raises(ValidationException):
            lipschitz_grid_problem(p=4)

    def test_point_mass_has_zero_w1(self):
        P, spec, metric, _ = lipschitz_grid_problem(p=2, x_points=3, y_levels=2)
        point = DiscreteDist.point_mass(P.outcomes, P.outcomes[5])
        assert wasserstein1_discrete(point, point, metric).cost == pytest.approx(0.0, abs=1e-12)
        assert erm_from_empirical(point, point, spec, n=1).excess_risk == 0.0

    @pytest.mark.slow
    @pytest.mark.parametrize("loss", ["absolute", "squared"])
    def test_rate_and_bound(self, loss, serial_runner):
        P, spec, metric, rho_f = lipschitz_grid_problem(p=2, loss=loss, seed=2)
        result = lipschitz_rate_check(
            P, spec, metric, rho_f, [8, 16, 32, 64, 128, 256], trials=200, seed=5, loss=loss, runner=serial_runner
        )
        summary = result.summary
        assert summary["theorem_exponent"].iloc[0] == pytest.approx(-1.0 / 3.0)
        assert abs(summary["fitted_exponent"].iloc[0] + 1.0 / 3.0) <= 0.15
        assert (summary["mean_excess"] <= summary["mean_wasserstein_bound"] + 1e-12).all()
