"""
Entropy Continuity Bounds
=========================

All the evaluators in this module start from one inequality. Let a_P and
a_Q be the optimal actions of P and Q. Then

    E_P l(Z, a_P) - E_Q l(Z, a_P)  <=  H(P) - H(Q)  <=  E_P l(Z, a_Q) - E_Q l(Z, a_Q)

because H(P) <= E_P l(Z, a_Q) and H(Q) = E_Q l(Z, a_Q). Bounding H(P) - H(Q)
is then the same as bounding how much the mean of a fixed function f
changes when P replaces Q. Each family of bounds does that with a
different distance between P and Q:

    total variation   (beta_a - alpha_a) * d_TV           f takes values in [alpha_a, beta_a]
    KL (subgaussian)  sqrt(2 sigma^2 D(P || Q))           f is sigma^2-subgaussian under Q
    KL (CGF)          phi*^{-1}(D(P || Q))               log-MGF of f under Q below phi
    Renyi condition   sqrt(2 sigma^2 D(P || Q))           log loss, sigma^2 fitted on a lambda grid
    chi-square        sqrt(Var_Q f * chi^2(P || Q))       Hammersley-Chapman-Robbins
    Wasserstein       rho_a * W_d(P, Q)                   f is rho_a-Lipschitz w.r.t. d
    semidistance      d_{A,l}(P, Q)                       sup over every action at once

Each evaluator returns an (upper, lower) pair: ``upper`` bounds
H(P) - H(Q) with f = l(., a_Q), ``lower`` bounds H(Q) - H(P) with
f = l(., a_P). The pushforward variants replace (P, Q) with the laws of
f(Z), which is never looser.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from entropy_bounds.bounds.baselines import baseline_bounds
from entropy_bounds.bounds.report import (
    BoundReport,
    Computation,
    ReportPair,
    absolute_report,
    guarded_pair,
    guarded_report,
)
from entropy_bounds.core.config import settings
from entropy_bounds.core.exceptions import NotApplicableException, ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist
from entropy_bounds.distributions.gaussian import GaussianScalar
from entropy_bounds.divergence.f_divergences import chi2, kl, renyi_cross, renyi_entropy, tv
from entropy_bounds.divergence.loss_distances import pushforward_pair, semidistance_al
from entropy_bounds.divergence.transport import wasserstein1_1d, wasserstein1_discrete
from entropy_bounds.entropy.generalized import generalized_entropy
from entropy_bounds.legendre.envelope import CgfEnvelope, envelope_violation, kl_bound_from_cgf
from entropy_bounds.losses.loss_spec import LossSpec, lipschitz_constant, loss_column, loss_range
from entropy_bounds.losses.metrics import default_metric

logger = logging.getLogger(__name__)

BOUND_FAMILIES = (
    "tv",
    "kl",
    "kl_general",
    "renyi",
    "chi2",
    "pushforward",
    "wasserstein",
    "semidistance",
    "baseline",
)
PUSHFORWARD_DIVERGENCES = ("tv", "kl", "chi2", "wasserstein")
BASELINE_TARGET_BY_KIND = {"log": "shannon", "quadratic": "variance"}


def _actions(P: DiscreteDist, Q: DiscreteDist, spec: LossSpec) -> Tuple[Any, Any]:
    P.require_same_support(Q)
    return generalized_entropy(P, spec).optimal_action, generalized_entropy(Q, spec).optimal_action


def _root(scale: float, distance: float) -> float:
    """sqrt(scale * distance); an infinite distance gives +inf even at scale 0."""
    if math.isinf(distance):
        return math.inf
    return math.sqrt(scale * max(0.0, distance))


def entropy_difference_report(P, Q, spec: LossSpec) -> BoundReport:
    """The exact H(P) - H(Q), reported next to the bounds."""
    try:
        diff = generalized_entropy(P, spec).value - generalized_entropy(Q, spec).value
    except NotApplicableException as exc:
        return BoundReport.not_applicable("entropy_difference", exc.message, "generalized-entropy", "value")
    return BoundReport(
        name="entropy_difference",
        value=diff,
        applicable=True,
        citation="generalized-entropy",
        direction="value",
    )


# =============================================================================
# TOTAL VARIATION
# =============================================================================

def tv_bound(P: DiscreteDist, Q: DiscreteDist, spec: LossSpec) -> ReportPair:
    """
    (beta_Q - alpha_Q) d_TV and (beta_P - alpha_P) d_TV with tight per-action ranges.

    For log loss beta - alpha = log(max P / min P), so the pair combines into
    log(P_bar v Q_bar) d_TV.
    """
    a_p, a_q = _actions(P, Q, spec)
    distance = tv(P, Q)

    def direction(action, label: str) -> Computation:
        def compute():
            alpha, beta = loss_range(spec, action, P.outcomes)
            conditions = [f"l(., a_{label}) in [{alpha:.6g}, {beta:.6g}]"]
            if spec.kind == "log":
                conditions.append(f"{label}_bar = max/min probability = {math.exp(beta - alpha):.6g}")
            extras = {"alpha": alpha, "beta": beta, "tv": distance}
            if spec.kind == "quadratic":
                # coarser range when only Z in [min z, max z] is known
                z = P.values()
                extras["interval_bound"] = float(np.ptp(z)) ** 2 * distance
            return (beta - alpha) * distance, conditions, extras
        return compute

    return guarded_pair("tv", "tv-continuity", direction(a_q, "Q"), direction(a_p, "P"))


# =============================================================================
# KL DIVERGENCE
# =============================================================================

def kl_subgaussian_bound(
    P: DiscreteDist,
    Q: DiscreteDist,
    spec: LossSpec,
    sigma2_q: Optional[float] = None,
    sigma2_p: Optional[float] = None,
) -> ReportPair:
    """
    sqrt(2 sigma_Q^2 D(P || Q)) and sqrt(2 sigma_P^2 D(P || Q)).

    Missing constants are derived from the loss range: a variable in
    [alpha, beta] is (beta - alpha)^2 / 4 subgaussian.
    """
    a_p, a_q = _actions(P, Q, spec)
    divergence = max(0.0, kl(P, Q))

    def direction(action, sigma2: Optional[float]) -> Computation:
        def compute():
            if sigma2 is not None:
                s2, conditions = float(sigma2), [f"supplied subgaussian constant {sigma2:.6g}"]
            else:
                alpha, beta = loss_range(spec, action, P.outcomes)
                s2 = (beta - alpha) ** 2 / 4.0
                conditions = [f"bounded loss in [{alpha:.6g}, {beta:.6g}] gives sigma2 = {s2:.6g}"]
            value = _root(2.0 * s2, divergence)
            return value, conditions, {"sigma2": s2, "kl": divergence}
        return compute

    return guarded_pair("kl_subgaussian", "kl-subgaussian-continuity", direction(a_q, sigma2_q), direction(a_p, sigma2_p))


def kl_general_bound(
    P: DiscreteDist,
    Q: DiscreteDist,
    spec: LossSpec,
    env_q: Optional[CgfEnvelope] = None,
    env_p: Optional[CgfEnvelope] = None,
) -> ReportPair:
    """
    phi_Q*^{-1}(D(P || Q)) and phi_P*^{-1}(D(P || Q)).

    A supplied envelope is checked against the exact CGF on its lambda grid;
    without one the exact CGF itself is used.
    """
    a_p, a_q = _actions(P, Q, spec)
    divergence = max(0.0, kl(P, Q))

    def direction(action, env: Optional[CgfEnvelope], sign: float) -> Computation:
        def compute():
            f = loss_column(spec, P.outcomes, action)
            if not np.all(np.isfinite(f[Q.probs > 0])):
                raise NotApplicableException("loss is infinite on the support of Q")
            extras: Dict[str, float] = {"kl": divergence}
            if env is None:
                use = CgfEnvelope.exact(f, Q.probs, sign)
                conditions = ["exact CGF under Q used as envelope"]
            else:
                lam = envelope_violation(env, f, Q.probs, sign)
                if lam is not None:
                    raise NotApplicableException(f"CGF condition fails at lambda={lam:.6g} for {env.describe()}")
                use = env
                conditions = [f"CGF condition verified on the lambda grid for {env.describe()}"]
            return kl_bound_from_cgf(use, divergence), conditions, extras
        return compute

    return guarded_pair("kl_cgf", "kl-cgf-continuity", direction(a_q, env_q, 1.0), direction(a_p, env_p, -1.0))


def gaussian_variance_kl_bound(P, Q: GaussianScalar, kl_value: Optional[float] = None) -> BoundReport:
    """
    |Var_P - Var_Q| <= 2 sigma^2 (sqrt(D) + D) for Gaussian Q = N(mu, sigma^2).

    The upper direction comes from the chi-square CGF envelope of (Z - E_Q Z)^2.
    The lower direction is 2 sigma^2 sqrt(D) + (E_P Z - E_Q Z)^2, reported
    in ``extras``; the mean gap is at most 2 sigma^2 D.
    """
    citation = "gaussian-variance-kl"
    if not isinstance(Q, GaussianScalar):
        return BoundReport.not_applicable("gaussian_variance.abs", "Q must be Gaussian", citation)
    divergence = kl(P, Q) if kl_value is None else float(kl_value)
    if divergence < 0:
        raise ValidationException("KL value must be nonnegative", details={"kl": divergence})
    var_p = P.variance() if isinstance(P, DiscreteDist) else P.variance
    mean_p = P.mean() if isinstance(P, DiscreteDist) else P.mean
    s2 = Q.variance
    if math.isinf(divergence):
        value = lower = math.inf
    else:
        value = 2.0 * s2 * (math.sqrt(divergence) + divergence)
        lower = 2.0 * s2 * math.sqrt(divergence) + (mean_p - Q.mean) ** 2
    return BoundReport(
        name="gaussian_variance.abs",
        value=value,
        applicable=True,
        conditions=[f"Q Gaussian with variance {s2:.6g}", "chi-square CGF envelope for the upper direction"],
        citation=citation,
        direction="abs",
        extras={
            "kl": divergence,
            "actual_gap": var_p - s2,
            "upper_direction": value,
            "lower_direction": lower,
        },
    )


# =============================================================================
# RENYI CONDITION
# =============================================================================

def _fit_sigma2(lams: np.ndarray, gaps: np.ndarray) -> float:
    if not np.all(np.isfinite(gaps)):
        raise NotApplicableException("Renyi gap is infinite on the lambda grid")
    ratio = 2.0 * gaps / lams
    k = int(np.argmax(ratio))
    if k == lams.size - 1 and ratio[-1] > ratio[-2] * (1.0 + 1e-9) and ratio[-1] > 0:
        raise NotApplicableException("Renyi gap grows superlinearly on the lambda grid")
    return max(0.0, float(ratio[k]))


def renyi_condition_bound(P: DiscreteDist, Q: DiscreteDist, n_grid: int = 400) -> ReportPair:
    """
    Log-loss bounds with grid-fitted constants.

    sigma_Q^2 is the smallest value with R_{1-lambda}(Q) - R_1(Q) <= lambda sigma_Q^2 / 2
    on the grid, sigma_P^2 the smallest with R_1(Q, P) - R_{1+lambda}(Q, P) <= lambda sigma_P^2 / 2.
    The constants are fitted, not certified between grid points.
    """
    P.require_same_support(Q)
    divergence = max(0.0, kl(P, Q))
    lams = np.geomspace(1e-4, settings.RENYI_LAMBDA_MAX, n_grid)
    grid_note = f"grid-fit constant on lambda in (0, {settings.RENYI_LAMBDA_MAX:g}]"

    def upper():
        base = renyi_entropy(Q, 1.0)
        gaps = np.array([renyi_entropy(Q, 1.0 - lam) - base for lam in lams])
        s2 = _fit_sigma2(lams, gaps)
        value = _root(2.0 * s2, divergence)
        return value, [grid_note], {"sigma2": s2, "kl": divergence}

    def lower():
        base = renyi_cross(Q, P, 1.0)
        if math.isinf(base):
            raise NotApplicableException("P vanishes on the support of Q")
        gaps = np.array([base - renyi_cross(Q, P, 1.0 + lam) for lam in lams])
        s2 = _fit_sigma2(lams, gaps)
        value = _root(2.0 * s2, divergence)
        return value, [grid_note], {"sigma2": s2, "kl": divergence}

    return guarded_pair("renyi", "renyi-condition-continuity", upper, lower)


# =============================================================================
# CHI-SQUARE
# =============================================================================

def chi2_bound(P: DiscreteDist, Q: DiscreteDist, spec: LossSpec) -> ReportPair:
    """
    sqrt(Var_Q[l(Z, a_Q)] chi^2(P || Q)) and sqrt(Var_Q[l(Z, a_P)] chi^2(P || Q)).

    For log loss the variances are the varentropy of Q and the cross
    varentropy Var_Q[log P(Z)].
    """
    a_p, a_q = _actions(P, Q, spec)
    divergence = chi2(P, Q)
    mask = Q.probs > 0
    q = Q.probs[mask]

    def direction(action, key: str) -> Computation:
        def compute():
            f = loss_column(spec, P.outcomes, action)[mask]
            if not np.all(np.isfinite(f)):
                raise NotApplicableException("infinite variance under Q")
            var = float(q @ (f - q @ f) ** 2)
            value = _root(var, divergence)
            name = key if spec.kind == "log" else "variance"
            return value, [f"Var_Q = {var:.6g} finite"], {name: var, "chi2": divergence}
        return compute

    return guarded_pair("chi2", "chi2-hcr-continuity", direction(a_q, "varentropy"), direction(a_p, "cross_varentropy"))


# =============================================================================
# PUSHFORWARD VARIANTS
# =============================================================================

def pushforward_bounds(P: DiscreteDist, Q: DiscreteDist, spec: LossSpec, which: str) -> ReportPair:
    """
    The TV, KL, chi-square or Wasserstein bound computed between the laws of
    l(Z, a) under P and under Q, with a = a_Q (upper) or a_P (lower).
    """
    if which not in PUSHFORWARD_DIVERGENCES:
        raise ValidationException(
            f"Unknown pushforward divergence {which!r}", details={"valid": list(PUSHFORWARD_DIVERGENCES)}
        )
    a_p, a_q = _actions(P, Q, spec)

    def direction(action) -> Computation:
        def compute():
            p_l, q_l = pushforward_pair(P, Q, spec, action)
            values = p_l.values()
            if not np.all(np.isfinite(values)):
                raise NotApplicableException("loss is unbounded at this action")
            alpha, beta = float(values.min()), float(values.max())
            extras: Dict[str, float] = {"alpha": alpha, "beta": beta}
            if which == "tv":
                distance = tv(p_l, q_l)
                value = (beta - alpha) * distance
            elif which == "kl":
                distance = kl(p_l, q_l)
                value = _root((beta - alpha) ** 2 / 2.0, distance)
            elif which == "chi2":
                distance = chi2(p_l, q_l)
                q = q_l.probs
                var = float(q @ (values - q @ values) ** 2)
                extras["variance"] = var
                value = _root(var, distance)
            else:
                distance = wasserstein1_1d(p_l, q_l)
                value = distance
            extras[which] = distance
            return value, [f"pushforward on {len(p_l)} loss values"], extras
        return compute

    return guarded_pair(f"pushforward_{which}", f"pushforward-{which}-continuity", direction(a_q), direction(a_p))


# =============================================================================
# WASSERSTEIN AND SEMIDISTANCE
# =============================================================================

def wasserstein_lipschitz_bound(
    P: DiscreteDist,
    Q: DiscreteDist,
    spec: LossSpec,
    metric: Optional[np.ndarray] = None,
) -> ReportPair:
    """
    rho_Q W_d(P, Q) and rho_P W_d(P, Q), with tight Lipschitz constants.

    When the loss is the metric itself (zero-one, metric kind, absolute loss on
    the line) rho = 1 and the bound is W_l(P, Q); for zero-one loss that is d_TV.
    """
    a_p, a_q = _actions(P, Q, spec)
    citation = "wasserstein-lipschitz-continuity"
    try:
        d = default_metric(P, spec) if metric is None else np.asarray(metric, dtype=float)
        plan = wasserstein1_discrete(P, Q, d)
    except ValidationException as exc:
        return (
            BoundReport.not_applicable("wasserstein.upper", exc.message, citation, "upper"),
            BoundReport.not_applicable("wasserstein.lower", exc.message, citation, "lower"),
        )

    def direction(action, label: str) -> Computation:
        def compute():
            rho = lipschitz_constant(spec, action, P.outcomes, d)
            conditions = [f"l(., a_{label}) is {rho:.6g}-Lipschitz w.r.t. the metric"]
            return rho * plan.cost, conditions, {"rho": rho, "wasserstein": plan.cost}
        return compute

    return guarded_pair("wasserstein", citation, direction(a_q, "Q"), direction(a_p, "P"))


def semidistance_bound(P: DiscreteDist, Q: DiscreteDist, spec: LossSpec) -> BoundReport:
    """|H(P) - H(Q)| <= d_{A,l}(P, Q)."""

    def compute():
        return semidistance_al(P, Q, spec), ["sup over the action set"], {}

    return guarded_report("semidistance.abs", "abs", "semidistance-continuity", compute)


# =============================================================================
# ALL FAMILIES
# =============================================================================

def evaluate_bounds(
    P: DiscreteDist,
    Q: DiscreteDist,
    spec: LossSpec,
    families: Optional[Sequence[str]] = None,
    metric: Optional[np.ndarray] = None,
) -> List[BoundReport]:
    """
    Every applicable evaluator for one (P, Q, loss) triple.

    The first report is the exact entropy difference; each direction pair is
    followed by its combined ``abs`` report.
    """
    families = tuple(families or BOUND_FAMILIES)
    unknown = set(families) - set(BOUND_FAMILIES)
    if unknown:
        raise ValidationException(
            f"Unknown bound family {sorted(unknown)[0]!r}", details={"valid": list(BOUND_FAMILIES)}
        )

    reports: List[BoundReport] = [entropy_difference_report(P, Q, spec)]

    def add_pair(pair: ReportPair):
        reports.extend(pair)
        reports.append(absolute_report(pair))

    if "tv" in families:
        add_pair(tv_bound(P, Q, spec))
    if "kl" in families:
        add_pair(kl_subgaussian_bound(P, Q, spec))
    if "kl_general" in families:
        add_pair(kl_general_bound(P, Q, spec))
    if "renyi" in families and spec.kind == "log":
        add_pair(renyi_condition_bound(P, Q))
    if "chi2" in families:
        add_pair(chi2_bound(P, Q, spec))
    if "pushforward" in families:
        for which in PUSHFORWARD_DIVERGENCES:
            add_pair(pushforward_bounds(P, Q, spec, which))
    if "wasserstein" in families:
        add_pair(wasserstein_lipschitz_bound(P, Q, spec, metric))
    if "semidistance" in families:
        reports.append(semidistance_bound(P, Q, spec))
    if "baseline" in families and spec.kind in BASELINE_TARGET_BY_KIND:
        reports.extend(baseline_bounds(P, Q, BASELINE_TARGET_BY_KIND[spec.kind]))

    n_missing = sum(not r.applicable for r in reports)
    logger.info("evaluated %d reports (%d not applicable)", len(reports), n_missing)
    return reports
