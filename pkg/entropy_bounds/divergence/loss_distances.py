"""
Loss-Induced Distances
======================

Two ways to compare P and Q only through what a loss can see.

Pushforward: fix an action a and look at the distribution of the random
loss value l(Z, a). Any divergence between the pushforwards of P and Q is at
most the divergence between P and Q (data processing), so bounds stated
through pushforwards are never looser.

(A, l)-semidistance:

    d_{A,l}(P, Q) = sup_{a in A} |E_P l(Z, a) - E_Q l(Z, a)|

It can vanish for P != Q (a constant loss cannot tell them apart), hence
"semi". With A = all [0, 1]-valued functions it is the total variation.
"""

import math
from typing import Any, Tuple

import numpy as np

from entropy_bounds.core.exceptions import NotApplicableException
from entropy_bounds.distributions.discrete import DiscreteDist
from entropy_bounds.losses.loss_spec import LossSpec, loss_column, loss_matrix

MERGE_TOL = 1e-12


def _group_values(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Sorted distinct values (merged within MERGE_TOL) and each entry's group index."""
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    with np.errstate(invalid="ignore"):
        gaps = np.diff(sorted_vals)
        scale = np.maximum(1.0, np.abs(sorted_vals[1:]))
        finite_to_inf = np.isinf(sorted_vals[1:]) & ~np.isinf(sorted_vals[:-1])
        new_group = (gaps > MERGE_TOL * scale) | finite_to_inf
    group_sorted = np.concatenate(([0], np.cumsum(new_group)))
    groups = np.empty_like(group_sorted)
    groups[order] = group_sorted
    firsts = np.concatenate(([True], new_group))
    return sorted_vals[firsts], groups


def pushforward_pair(P: DiscreteDist, Q: DiscreteDist, spec: LossSpec, action: Any) -> Tuple[DiscreteDist, DiscreteDist]:
    """Pushforwards of P and Q through l(., action) on a common value support."""
    P.require_same_support(Q)
    col = loss_column(spec, P.outcomes, action)
    values, groups = _group_values(col)
    p = np.bincount(groups, weights=P.probs, minlength=values.size)
    q = np.bincount(groups, weights=Q.probs, minlength=values.size)
    labels = tuple(float(v) for v in values)
    return DiscreteDist(labels, p), DiscreteDist(labels, q)


def pushforward(P: DiscreteDist, spec: LossSpec, action: Any) -> DiscreteDist:
    """
    Distribution of l(Z, action) under P.

    Equal loss values are merged and sorted ascending; outcomes of P with zero
    mass keep their (zero-mass) loss value.
    """
    return pushforward_pair(P, P, spec, action)[0]


def semidistance_al(P: DiscreteDist, Q: DiscreteDist, spec: LossSpec) -> float:
    """
    sup over actions of |E_P l(Z, a) - E_Q l(Z, a)|.

    Finite action sets are scanned column by column. The real-action losses
    have closed forms: the quadratic gap is affine in a, the absolute gap is
    piecewise linear with breakpoints at the support points. Log loss can
    put arbitrarily small mass where P and Q differ, so the sup is +inf
    unless P = Q.

    Raises:
        NotApplicableException: no closed form for this loss kind.
    """
    P.require_same_support(Q)
    diff = P.probs - Q.probs
    if spec.has_finite_actions():
        matrix, _ = loss_matrix(spec, P.outcomes)
        return float(np.max(np.abs(diff @ matrix)))
    if spec.kind == "log":
        return 0.0 if np.max(np.abs(diff)) <= 1e-15 else math.inf
    z = P.values()
    if spec.kind == "quadratic":
        m2_gap = float(diff @ z ** 2)
        mean_gap = float(diff @ z)
        if spec.domain is not None:
            return max(abs(m2_gap - 2 * a * mean_gap) for a in spec.domain)
        return abs(m2_gap) if abs(mean_gap) <= 1e-15 else math.inf
    if spec.kind == "absolute":
        candidates = z if spec.domain is None else np.concatenate((z, spec.domain))
        gaps = np.abs(np.abs(z[:, None] - candidates[None, :]).T @ diff)
        return float(gaps.max())
    raise NotApplicableException(
        "No closed form for the semidistance of this loss", details={"kind": spec.kind}
    )
