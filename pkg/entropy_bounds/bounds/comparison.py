"""
Bernoulli Comparison Grid
=========================

Log-loss TV bound log(P_bar v Q_bar) d_TV against the coupling baseline
d_TV log(|Z| - 1) + h2(d_TV) over pairs of Bernoulli distributions on the
open grid {1, ..., m} / (m + 1). Both bounds are symmetric in (p, q), so
the ``new_tighter`` map is too.
"""

import logging

import numpy as np
import pandas as pd

from entropy_bounds.bounds.baselines import coupling_bound
from entropy_bounds.bounds.continuity import tv_bound
from entropy_bounds.bounds.report import absolute_report
from entropy_bounds.core.exceptions import ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist
from entropy_bounds.losses.loss_spec import LossSpec

logger = logging.getLogger(__name__)

MIN_DENSITY = 9


def bernoulli_pair_bounds(p: float, q: float) -> tuple:
    """(log-loss TV bound, coupling bound) for Bernoulli(p) vs Bernoulli(q)."""
    P, Q = DiscreteDist.bernoulli(p), DiscreteDist.bernoulli(q)
    new = absolute_report(tv_bound(P, Q, LossSpec("log")))
    return new.value, coupling_bound(P, Q).value


def bernoulli_comparison_grid(density: int = 99) -> pd.DataFrame:
    """
    Rows (p, q, bound_new, bound_zhang, new_tighter) over the density x density grid.

    ``new_tighter`` is False on the diagonal, where both bounds are 0.

    Raises:
        ValidationException: density below 9.
    """
    if density < MIN_DENSITY:
        raise ValidationException("Grid density must be at least 9", details={"density": density})
    grid = np.arange(1, density + 1) / (density + 1)
    rows = []
    for p in grid:
        for q in grid:
            new, baseline = bernoulli_pair_bounds(float(p), float(q))
            rows.append({"p": float(p), "q": float(q), "bound_new": new, "bound_zhang": baseline, "new_tighter": bool(new < baseline)})
    frame = pd.DataFrame(rows)

    flags = frame["new_tighter"].to_numpy().reshape(density, density)
    if not np.array_equal(flags, flags.T):
        raise ValidationException("Comparison map is not symmetric in (p, q)")
    logger.info("bernoulli grid %dx%d: new bound tighter on %d pairs", density, density, int(flags.sum()))
    return frame
