"""
Shared fixtures and pytest hooks for the entropy_bounds test suite.

Fixtures build small distributions, joints and losses whose entropies and
divergences have closed forms, plus a single-threaded trial runner so the
experiment tests stay deterministic and quiet.
"""

import os

import numpy as np
import pytest
from hypothesis import settings as hypothesis_settings

from entropy_bounds.distributions.discrete import DiscreteDist, JointDiscrete
from entropy_bounds.experiments.runner import TrialRunner
from entropy_bounds.losses.loss_spec import LossSpec

hypothesis_settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis_settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))


# =============================================================================
# PYTEST HOOKS
# =============================================================================

def pytest_configure(config):
    config.addinivalue_line("markers", "unit: Unit tests")
    config.addinivalue_line("markers", "slow: Randomized acceptance suites")
    config.addinivalue_line("markers", "integration: CLI and file-export tests")
    os.environ.setdefault("ENTROPY_BOUNDS_SHOW_PROGRESS", "false")


def pytest_collection_modifyitems(config, items):
    for item in items:
        if "slow" not in item.keywords and "integration" not in item.keywords:
            item.add_marker(pytest.mark.unit)


# =============================================================================
# DISTRIBUTIONS
# =============================================================================

@pytest.fixture
def coin_pair():
    """Bernoulli(0.2) and Bernoulli(0.3)."""
    return DiscreteDist.bernoulli(0.2), DiscreteDist.bernoulli(0.3)


@pytest.fixture
def three_point():
    return DiscreteDist(("a", "b", "c"), np.array([0.5, 0.3, 0.2]))


@pytest.fixture
def diagonal_joint():
    """[[0.4, 0.1], [0.1, 0.4]] on X = Y = {0, 1}."""
    return JointDiscrete((0, 1), (0, 1), np.array([[0.4, 0.1], [0.1, 0.4]]))


@pytest.fixture
def independent_joint():
    return JointDiscrete.product(DiscreteDist.bernoulli(0.3), DiscreteDist(("u", "v", "w"), np.array([0.2, 0.5, 0.3])))


# =============================================================================
# LOSSES
# =============================================================================

@pytest.fixture
def zero_one():
    return LossSpec("zero-one")


@pytest.fixture
def log_loss():
    return LossSpec("log")


@pytest.fixture
def small_table():
    """[[0.2, 0.9], [0.4, 0.1]] with outcomes (0, 1) and actions (0, 1)."""
    return LossSpec("table", table=np.array([[0.2, 0.9], [0.4, 0.1]]), outcomes=(0, 1))


# =============================================================================
# RUNNERS
# =============================================================================

@pytest.fixture
def serial_runner():
    return TrialRunner(max_workers=1, show_progress=False)
