"""
Optimal Transport
=================

Wasserstein-1 between discrete distributions, the exact way:

    W_d(P, Q) = min_{pi in Pi(P, Q)} sum_{i,j} pi[i, j] d[i, j]

where Pi(P, Q) is the set of couplings (row sums P, column sums Q). This is a
transportation linear program; at desk scale (supports up to 64) we hand it
to the HiGHS dual simplex, which returns a vertex, i.e. an exact optimal plan.
No entropic smoothing: the bounds are checked against exact distances.

On the real line two shortcuts exist and are used as oracles:
- W1 = integral of |F_P - F_Q| (CDF area)
- W2^2 = integral over u in (0, 1) of |F_P^{-1}(u) - F_Q^{-1}(u)|^2 (quantile coupling)
"""

import logging
import math
from dataclasses import dataclass
from typing import Hashable, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import linprog

from entropy_bounds.core.config import settings
from entropy_bounds.core.exceptions import NonConvergenceException, NotApplicableException, ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist, thaw_label
from entropy_bounds.distributions.gaussian import GaussianScalar
from entropy_bounds.losses.metrics import validate_metric

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """
    Optimal coupling and its cost.

    Attributes:
        coupling: |Z| x |Z| nonnegative matrix with row sums P and column sums Q.
        cost: sum(coupling * d).
        outcomes: Labels of the shared support.
    """

    coupling: np.ndarray
    cost: float
    outcomes: Tuple[Hashable, ...]

    def records(self) -> pd.DataFrame:
        """Nonzero entries as (row, col, mass) rows for CSV export."""
        rows, cols = np.nonzero(self.coupling > 0)
        return pd.DataFrame(
            {
                "row": [str(thaw_label(self.outcomes[i])) for i in rows],
                "col": [str(thaw_label(self.outcomes[j])) for j in cols],
                "mass": self.coupling[rows, cols],
            }
        )


def _sorted_masses(P: DiscreteDist) -> Tuple[np.ndarray, np.ndarray]:
    z = P.values()
    order = np.argsort(z, kind="stable")
    return z[order], P.probs[order]


def wasserstein1_1d(P: DiscreteDist, Q: DiscreteDist) -> float:
    """W1 on the real line by the CDF-area formula (supports may differ)."""
    zp, zq = P.values(), Q.values()
    xs = np.union1d(zp, zq)
    fp = np.zeros(xs.size)
    fq = np.zeros(xs.size)
    np.add.at(fp, np.searchsorted(xs, zp), P.probs)
    np.add.at(fq, np.searchsorted(xs, zq), Q.probs)
    gap = np.abs(np.cumsum(fp) - np.cumsum(fq))[:-1]
    return float(gap @ np.diff(xs))


def _quantiles(values: np.ndarray, masses: np.ndarray, u: np.ndarray) -> np.ndarray:
    cum = np.cumsum(masses)
    idx = np.minimum(np.searchsorted(cum, u, side="left"), values.size - 1)
    return values[idx]


def wasserstein2_1d(P: Union[DiscreteDist, GaussianScalar], Q: Union[DiscreteDist, GaussianScalar]) -> float:
    """W2 on the real line by quantile coupling; Gaussian pairs in closed form."""
    if isinstance(P, GaussianScalar) and isinstance(Q, GaussianScalar):
        return math.hypot(P.mean - Q.mean, P.std - Q.std)
    if not (isinstance(P, DiscreteDist) and isinstance(Q, DiscreteDist)):
        raise NotApplicableException("W2 needs two discrete or two Gaussian distributions")
    zp, mp = _sorted_masses(P)
    zq, mq = _sorted_masses(Q)
    u = np.unique(np.clip(np.concatenate(([0.0, 1.0], np.cumsum(mp), np.cumsum(mq))), 0.0, 1.0))
    widths = np.diff(u)
    mids = u[:-1] + widths / 2
    sq = (_quantiles(zp, mp, mids) - _quantiles(zq, mq, mids)) ** 2
    return float(math.sqrt(max(0.0, sq @ widths)))


def wasserstein1_discrete(P: DiscreteDist, Q: DiscreteDist, d) -> TransportPlan:
    """
    Exact W_d(P, Q) and an optimal plan by linear programming.

    Args:
        P: Source distribution.
        Q: Target distribution on the same support.
        d: |Z| x |Z| metric matrix (validated).

    Raises:
        ValidationException: support mismatch, support above the LP cap, or a metric-axiom violation.
        NonConvergenceException: the solver reports a non-optimal status.
    """
    P.require_same_support(Q)
    n = len(P)
    if n > settings.LP_MAX_SUPPORT:
        raise ValidationException(
            "Support too large for the exact transport LP",
            details={"size": n, "max": settings.LP_MAX_SUPPORT},
        )
    d = validate_metric(d)
    if d.shape != (n, n):
        raise ValidationException("Metric shape does not match the support")

    # 1. Restrict to the supports of P and Q
    rows = np.flatnonzero(P.probs > 0)
    cols = np.flatnonzero(Q.probs > 0)
    m, k = rows.size, cols.size
    cost = d[np.ix_(rows, cols)].ravel()

    # 2. Marginal constraints: row sums = P, column sums = Q
    a_eq = np.vstack([np.kron(np.eye(m), np.ones(k)), np.kron(np.ones(m), np.eye(k))])
    b_eq = np.concatenate([P.probs[rows], Q.probs[cols]])

    # 3. Solve with the dual simplex
    res = linprog(
        cost,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise NonConvergenceException(
            "Transport LP failed", details={"status": int(res.status), "message": res.message}
        )

    coupling = np.zeros((n, n))
    coupling[np.ix_(rows, cols)] = np.clip(res.x.reshape(m, k), 0.0, None)
    total = float(np.sum(coupling * d))
    logger.debug("transport LP solved: support %d x %d, cost %.6g", m, k, total)
    return TransportPlan(coupling=coupling, cost=total, outcomes=P.outcomes)
