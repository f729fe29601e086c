"""
Mutual-information upper bounds obtained from the log-loss continuity bounds.

I(X; Z) = H(P_Z) - H(P_Z | P_X) averages entropy differences between each
conditional P_{Z|X=x} and the marginal P_Z. With
gamma(x) = log(max_z P_{Z|X=x}(z) / min_z P_{Z|X=x}(z)) the bounds are

    sqrt(1/2 E[gamma(X)^2] L(X; Z))                    (KL route, lautum information)
    1/2 E[gamma(X)^2]                                  (Hoeffding on the log ratio)
    sup_x gamma(x) * sum_x P_X(x) d_TV(P_{Z|X=x}, P_Z)  (TV information)
"""

import logging
import math
from typing import List

import numpy as np
from scipy.special import rel_entr

from entropy_bounds.bounds.report import BoundReport
from entropy_bounds.distributions.discrete import JointDiscrete, thaw_label

logger = logging.getLogger(__name__)


def mutual_information(j: JointDiscrete) -> float:
    """I(X; Z) = D(P_{X,Z} || P_X x P_Z) in nats."""
    product = np.outer(j.probs.sum(axis=1), j.probs.sum(axis=0))
    return max(0.0, float(rel_entr(j.probs, product).sum()))


def lautum_information(j: JointDiscrete) -> float:
    """L(X; Z) = D(P_X x P_Z || P_{X,Z}); +inf when the joint has holes."""
    product = np.outer(j.probs.sum(axis=1), j.probs.sum(axis=0))
    return max(0.0, float(rel_entr(product, j.probs).sum()))


def mi_upper_bounds(j: JointDiscrete) -> List[BoundReport]:
    """The three gamma-based upper bounds on I(X; Z), plus the exact value first."""
    info = mutual_information(j)
    reports = [
        BoundReport(name="mutual_information", value=info, applicable=True, citation="mutual-information", direction="value")
    ]
    names = (("mi_lautum", "mi-lautum"), ("mi_gamma_square", "mi-gamma-square"), ("mi_tv_information", "mi-tv-information"))

    p_x = j.probs.sum(axis=1)
    rows = j.defined_rows()
    family = j.conditionals()
    zeros = [(i, int(np.argmin(family.rows[i]))) for i in rows if np.min(family.rows[i]) == 0.0]
    if zeros:
        i, k = zeros[0]
        reason = (
            f"P_Z|X has a zero entry at x={thaw_label(j.x_outcomes[i])!r}, "
            f"z={thaw_label(j.y_outcomes[k])!r}"
        )
        logger.info("MI gamma bounds not applicable: %s", reason)
        return reports + [BoundReport.not_applicable(name, reason, cite, "upper") for name, cite in names]

    cond = family.rows[rows]
    weights = p_x[rows]
    gamma = np.log(cond.max(axis=1) / cond.min(axis=1))
    half_mean_sq = 0.5 * float(weights @ gamma ** 2)
    lautum = lautum_information(j)
    tv_info = float(weights @ (0.5 * np.abs(cond - j.probs.sum(axis=0)[None, :]).sum(axis=1)))
    sup_gamma = float(gamma.max())
    conditions = ["all conditionals strictly positive"]

    values = (
        math.sqrt(half_mean_sq * lautum),
        half_mean_sq,
        sup_gamma * tv_info,
    )
    extras = {"mutual_information": info, "half_mean_gamma_sq": half_mean_sq, "sup_gamma": sup_gamma}
    for (name, cite), value, extra in zip(
        names, values, ({"lautum": lautum}, {}, {"tv_information": tv_info})
    ):
        reports.append(
            BoundReport(
                name=name,
                value=value,
                applicable=True,
                conditions=conditions,
                citation=cite,
                direction="upper",
                extras=extras | extra,
            )
        )
    return reports
