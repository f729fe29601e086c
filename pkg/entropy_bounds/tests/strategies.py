"""Hypothesis strategies for distributions on small finite supports."""

import numpy as np
from hypothesis import strategies as st

from entropy_bounds.distributions.discrete import DiscreteDist


def prob_vectors(min_size: int = 2, max_size: int = 6, floor: float = 0.0):
    """Probability vectors built from bounded nonnegative weights."""
    return (
        st.lists(st.floats(min_value=floor, max_value=1.0, allow_nan=False), min_size=min_size, max_size=max_size)
        .filter(lambda w: sum(w) > 1e-3)
        .map(lambda w: np.asarray(w) / np.sum(w))
    )


@st.composite
def dist_pairs(draw, min_size: int = 2, max_size: int = 6, floor: float = 0.0):
    """(P, Q) on a shared support of integer labels."""
    k = draw(st.integers(min_size, max_size))
    outcomes = tuple(range(k))
    p = draw(prob_vectors(k, k, floor))
    q = draw(prob_vectors(k, k, floor))
    return DiscreteDist(outcomes, p), DiscreteDist(outcomes, q)


@st.composite
def unit_tables(draw, rows: int, max_actions: int = 4):
    """A rows x m loss table with entries in [0, 1]."""
    m = draw(st.integers(1, max_actions))
    flat = draw(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=rows * m, max_size=rows * m))
    return np.asarray(flat).reshape(rows, m)
