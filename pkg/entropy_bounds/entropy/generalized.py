"""
Generalized Entropy
===================

The generalized entropy of P under a loss l and action space A is the
smallest achievable expected loss:

    H(P) = inf_{a in A} E_P[l(Z, a)]

and the optimal action a_P is the minimizer. Familiar quantities fall out
of the canonical losses:

- log loss       -> Shannon (or differential) entropy, a_P = P itself
- quadratic loss -> variance, a_P = the mean
- zero-one loss  -> 1 - max_z P(z), a_P = the mode
- absolute loss  -> minimum mean absolute deviation, a_P = the lower median
- table loss     -> brute-force column minimum

The conditional version takes the Bayes decision per observation x and
averages: H(P_{Y|X} | P_X) = sum_x P_X(x) H(P_{Y|X=x}).

Every argmin/argmax breaks ties by lowest index, so ERM hypotheses, Bayes
rules and the actions fed to the bound evaluators are reproducible.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.special import entr

from entropy_bounds.core.exceptions import (
    NotApplicableException,
    UndefinedConditionalException,
    ValidationException,
)
from entropy_bounds.distributions.discrete import DiscreteDist, JointDiscrete, freeze_label
from entropy_bounds.distributions.gaussian import GaussianMixture, GaussianScalar
from entropy_bounds.losses.loss_spec import LossSpec, loss_column, loss_matrix

ScalarDist = Union[GaussianScalar, GaussianMixture]


@dataclass(frozen=True)
class EntropyResult:
    """
    H(P) together with the action achieving it.

    Attributes:
        value: Generalized entropy (nats for log loss, loss units otherwise).
        optimal_action: a_P (a distribution for log loss, a real or a label otherwise).
        achieved: True when the infimum is attained by ``optimal_action``.
    """

    value: float
    optimal_action: Any
    achieved: bool = True


@dataclass(frozen=True)
class BayesRule:
    """Decision rule x -> action, defined on positive-mass x only."""

    x_outcomes: Tuple[Hashable, ...]
    actions: Dict[Hashable, Any] = field(default_factory=dict)

    def __call__(self, x: Hashable) -> Any:
        key = freeze_label(x)
        if key not in self.actions:
            raise UndefinedConditionalException(
                "Bayes rule is undefined at a zero-mass x", details={"x": x}
            )
        return self.actions[key]

    def is_defined(self, x: Hashable) -> bool:
        return freeze_label(x) in self.actions


def argmax_tiebreak(values) -> int:
    """Index of the first maximum."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValidationException("argmax of an empty sequence")
    if np.any(np.isnan(arr)):
        raise ValidationException("argmax over NaN values")
    return int(np.argmax(arr))


def argmin_tiebreak(values) -> int:
    """Index of the first minimum."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValidationException("argmin of an empty sequence")
    if np.any(np.isnan(arr)):
        raise ValidationException("argmin over NaN values")
    return int(np.argmin(arr))


def expected_loss(P: DiscreteDist, spec: LossSpec, action: Any) -> float:
    """E_P[l(Z, action)] with the 0 * inf = 0 convention."""
    col = loss_column(spec, P.outcomes, action)
    mask = P.probs > 0
    return float(P.probs[mask] @ col[mask])


def _lower_median(P: DiscreteDist) -> float:
    z = P.values()
    order = np.argsort(z, kind="stable")
    cum = np.cumsum(P.probs[order])
    return float(z[order][int(np.argmax(cum >= 0.5 - 1e-12))])


def _discrete_entropy(P: DiscreteDist, spec: LossSpec) -> EntropyResult:
    if spec.kind == "log":
        return EntropyResult(float(entr(P.probs).sum()), P)
    if spec.kind == "quadratic":
        return EntropyResult(P.variance(), P.mean())
    if spec.kind == "absolute":
        m = _lower_median(P)
        return EntropyResult(float(P.probs @ np.abs(P.values() - m)), m)
    if spec.kind == "zero-one":
        i = argmax_tiebreak(P.probs)
        return EntropyResult(float(1.0 - P.probs[i]), P.outcomes[i])
    matrix, actions = loss_matrix(spec, P.outcomes)
    risks = P.probs @ matrix
    j = argmin_tiebreak(risks)
    return EntropyResult(float(risks[j]), actions[j])


def _mixture_differential_entropy(P: GaussianMixture) -> float:
    lo, hi = P.support_interval()
    points = sorted(set(P.means.tolist()))

    def integrand(x):
        lp = float(P.logpdf(x))
        return -math.exp(lp) * lp

    value, _ = integrate.quad(integrand, lo, hi, points=points, limit=200, epsabs=1e-12)
    return float(value)


def _scalar_entropy(P: ScalarDist, spec: LossSpec) -> EntropyResult:
    if spec.kind == "quadratic":
        return EntropyResult(P.variance, P.mean)
    if isinstance(P, GaussianScalar):
        if spec.kind == "log":
            return EntropyResult(0.5 * math.log(2 * math.pi * math.e * P.variance), P)
        if spec.kind == "absolute":
            return EntropyResult(P.std * math.sqrt(2 / math.pi), P.mean)
    elif spec.kind == "log":
        return EntropyResult(_mixture_differential_entropy(P), P)
    raise NotApplicableException(
        f"{spec.kind!r} loss has no closed-form entropy for {type(P).__name__}",
        details={"kind": spec.kind},
    )


def generalized_entropy(P: Union[DiscreteDist, ScalarDist], spec: LossSpec) -> EntropyResult:
    """
    H(P) and a_P for a discrete or scalar continuous distribution.

    Raises:
        NotApplicableException: continuous P with a loss that has no closed form.
    """
    if isinstance(P, DiscreteDist):
        return _discrete_entropy(P, spec)
    if isinstance(P, (GaussianScalar, GaussianMixture)):
        return _scalar_entropy(P, spec)
    raise ValidationException("Unsupported distribution type", details={"type": type(P).__name__})


def conditional_entropy(j: JointDiscrete, spec: LossSpec) -> Tuple[float, BayesRule]:
    """
    H(P_{Y|X} | P_X) and the Bayes rule.

    Zero-mass rows contribute 0 and are left out of the rule.
    """
    p_x = j.marginal_x()
    family = j.conditionals()
    value = 0.0
    actions: Dict[Hashable, Any] = {}
    for i, x in enumerate(j.x_outcomes):
        if not family.defined[i]:
            continue
        result = generalized_entropy(family.row(i), spec)
        value += float(p_x.probs[i]) * result.value
        actions[x] = result.optimal_action
    return value, BayesRule(j.x_outcomes, actions)


def rule_risk(j: JointDiscrete, spec: LossSpec, rule: BayesRule) -> float:
    """E_P[l(Y, rule(X))] summed over positive-mass x."""
    family = j.conditionals()
    mass = j.probs.sum(axis=1)
    total = 0.0
    for i, x in enumerate(j.x_outcomes):
        if mass[i] > 0:
            total += float(mass[i]) * expected_loss(family.row(i), spec, rule(x))
    return total
