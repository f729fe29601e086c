"""
Decisions Under Distributional Drift
====================================

psi_P and psi_Q are the Bayes rules of two joints P = P_X x P_{Y|X} and
Q = Q_X x Q_{Y|X}. The conditional analogue of the expected-loss comparison is

    H(P_{Y|X} | P_X) - H(Q_{Y|X} | Q_X) <= E_P l(Y, psi_Q(X)) - E_Q l(Y, psi_Q(X))

(and the same with P, Q exchanged), so every unconditional bound carries over
with distances between the joints. Using psi_Q where P holds costs

    excess = E_P l(Y, psi_Q(X)) - H(P_{Y|X} | P_X) <= 2 B

for B any such bound on |H_Q - H_P| (B_Q), or on |H(Q_{Y|X} | P_X) - H_P|
(B_P, computed on the mixed joint P_X x Q_{Y|X}, where psi_Q stays Bayes).
"""

import logging
import math
from typing import List, Tuple

import numpy as np
from scipy import integrate
from scipy.special import logsumexp, rel_entr

from entropy_bounds.bounds.continuity import tv_bound
from entropy_bounds.bounds.report import BoundReport, Computation, absolute_report, guarded_pair
from entropy_bounds.core.exceptions import (
    BoundViolationException,
    NotApplicableException,
    UndefinedConditionalException,
    ValidationException,
)
from entropy_bounds.distributions.discrete import DiscreteDist, JointDiscrete
from entropy_bounds.divergence.f_divergences import chi2, tv
from entropy_bounds.entropy.generalized import BayesRule, conditional_entropy, expected_loss, rule_risk
from entropy_bounds.losses.loss_spec import REAL_KINDS, LossSpec, loss_matrix

logger = logging.getLogger(__name__)

VIOLATION_TOL = 1e-9


def _require_same_labels(Pj: JointDiscrete, Qj: JointDiscrete) -> None:
    if Pj.x_outcomes != Qj.x_outcomes or Pj.y_outcomes != Qj.y_outcomes:
        raise ValidationException("Joints must share X and Y labels in the same order")


def loss_interval(spec: LossSpec, y_outcomes) -> Tuple[float, float]:
    """Global [alpha, beta] of l(y, a) over Y and every action."""
    if spec.has_finite_actions():
        matrix, _ = loss_matrix(spec, y_outcomes)
        return float(matrix.min()), float(matrix.max())
    if spec.value_range is not None:
        return spec.value_range
    if spec.kind in REAL_KINDS:
        # Bayes actions lie in [min y, max y]
        width = float(np.ptp(np.asarray(y_outcomes, dtype=float)))
        return 0.0, width ** 2 if spec.kind == "quadratic" else width
    raise NotApplicableException("No global loss range for this loss", details={"kind": spec.kind})


def conditional_kl(Pj: JointDiscrete, Qj: JointDiscrete) -> float:
    """D(P_{Y|X} || Q_{Y|X} | P_X); +inf when Q_{Y|X=x} is undefined at a P-positive x."""
    p_rows, q_rows = Pj.conditionals(), Qj.conditionals()
    p_x = Pj.probs.sum(axis=1)
    total = 0.0
    for i in Pj.defined_rows():
        if not q_rows.defined[i]:
            return math.inf
        total += float(p_x[i]) * float(rel_entr(p_rows.rows[i], q_rows.rows[i]).sum())
    return total


def mixed_joint(Pj: JointDiscrete, Qj: JointDiscrete) -> JointDiscrete:
    """P_X x Q_{Y|X}; rows where Q_{Y|X} is undefined need P_X(x) = 0."""
    family = Qj.conditionals()
    p_x = Pj.marginal_x()
    if np.any((p_x.probs > 0) & ~family.defined):
        raise UndefinedConditionalException(
            "Q_{Y|X} is undefined where P_X has mass", details={"rows": int(np.sum((p_x.probs > 0) & ~family.defined))}
        )
    return JointDiscrete.from_rows(p_x, family.rows, Pj.y_outcomes)


def _cross_risk_term(Aj: JointDiscrete, Bj: JointDiscrete, spec: LossSpec, rule: BayesRule, h_b: float) -> Computation:
    """E_A l(Y, rule(X)) - H_B with rule Bayes under B."""

    def compute():
        return rule_risk(Aj, spec, rule) - h_b, ["exact expected-loss comparison"], {}

    return compute


def _route_pairs(Pj, Qj, spec, prefix: str, citation: str) -> List[Tuple[BoundReport, BoundReport]]:
    """Cross-risk, KL and TV routes for |H(P_{Y|X}|P_X) - H(Q_{Y|X}|Q_X)|."""
    h_p, psi_p = conditional_entropy(Pj, spec)
    h_q, psi_q = conditional_entropy(Qj, spec)
    p_flat, q_flat = Pj.flatten(), Qj.flatten()
    divergence = float(rel_entr(p_flat.probs, q_flat.probs).sum())
    distance = tv(p_flat, q_flat)

    def kl_route() -> Computation:
        def compute():
            alpha, beta = loss_interval(spec, Pj.y_outcomes)
            value = math.inf if math.isinf(divergence) else (beta - alpha) * math.sqrt(0.5 * divergence)
            extras = {
                "kl_joint": divergence,
                "kl_marginal": float(rel_entr(Pj.probs.sum(axis=1), Qj.probs.sum(axis=1)).sum()),
                "kl_conditional": conditional_kl(Pj, Qj),
            }
            return value, [f"loss in [{alpha:.6g}, {beta:.6g}]"], extras
        return compute

    def tv_route() -> Computation:
        def compute():
            alpha, beta = loss_interval(spec, Pj.y_outcomes)
            return (beta - alpha) * distance, [f"loss in [{alpha:.6g}, {beta:.6g}]"], {"tv_joint": distance}
        return compute

    return [
        guarded_pair(
            f"{prefix}_cross_risk",
            citation,
            _cross_risk_term(Pj, Qj, spec, psi_q, h_q),
            _cross_risk_term(Qj, Pj, spec, psi_p, h_p),
        ),
        guarded_pair(f"{prefix}_kl", citation, kl_route(), kl_route()),
        guarded_pair(f"{prefix}_tv", citation, tv_route(), tv_route()),
    ]


def _per_x_tv(Pj: JointDiscrete, Qj: JointDiscrete, spec: LossSpec) -> BoundReport:
    """sum_x P_X(x) * (per-x TV bound on |H(P_x) - H(Q_x)|) for a shared marginal."""
    name, citation = "cond_shared_tv.abs", "conditional-shared-marginal"
    p_rows, q_rows = Pj.conditionals(), Qj.conditionals()
    p_x = Pj.probs.sum(axis=1)
    total = 0.0
    for i in Pj.defined_rows():
        report = absolute_report(tv_bound(p_rows.row(i), q_rows.row(i), spec))
        if not report.applicable:
            return BoundReport.not_applicable(name, "; ".join(report.conditions), citation)
        total += float(p_x[i]) * report.value
    return BoundReport(
        name=name, value=total, applicable=True, conditions=["shared X marginal"], citation=citation
    )


def cond_entropy_diff_bounds(Pj: JointDiscrete, Qj: JointDiscrete, spec: LossSpec) -> List[BoundReport]:
    """
    Bounds on H(P_{Y|X} | P_X) - H(Q_{Y|X} | Q_X).

    The first report is the exact difference. Then come the cross-risk route
    (exact expected-loss comparison), the KL route
    (beta - alpha) sqrt(D(P_{X,Y} || Q_{X,Y}) / 2) with its chain-rule split
    in ``extras``, and the TV route, each as an upper/lower pair plus its
    ``abs`` combination. With a shared X marginal the per-x TV route is added.
    """
    _require_same_labels(Pj, Qj)
    h_p, _ = conditional_entropy(Pj, spec)
    h_q, _ = conditional_entropy(Qj, spec)
    reports = [
        BoundReport(
            name="cond_entropy_difference",
            value=h_p - h_q,
            applicable=True,
            citation="conditional-entropy",
            direction="value",
        )
    ]
    for pair in _route_pairs(Pj, Qj, spec, "cond", "conditional-entropy-difference"):
        reports.extend(pair)
        reports.append(absolute_report(pair))
    if Pj.marginal_x().allclose(Qj.marginal_x()):
        reports.append(_per_x_tv(Pj, Qj, spec))
    return reports


# =============================================================================
# EXCESS RISK OF A MISMATCHED RULE
# =============================================================================

def _doubled(pair_or_report, name: str, citation: str) -> BoundReport:
    """2 B from a direction pair (B = max of the pair) or an abs report."""
    report = pair_or_report if isinstance(pair_or_report, BoundReport) else absolute_report(pair_or_report)
    if not report.applicable:
        return BoundReport.not_applicable(name, "; ".join(report.conditions), citation, "upper")
    return BoundReport(
        name=name,
        value=2.0 * report.value,
        applicable=True,
        conditions=report.conditions,
        citation=citation,
        direction="upper",
        extras={"B": report.value},
    )


def _rule_gap(j: JointDiscrete, spec: LossSpec, rule: BayesRule, best: BayesRule) -> float:
    """sum_x P_X(x) (E l(Y, rule(x)) - E l(Y, best(x))); rows where the actions agree add exactly 0."""
    family = j.conditionals()
    mass = j.probs.sum(axis=1)
    total = 0.0
    for i, x in enumerate(j.x_outcomes):
        if mass[i] > 0 and rule(x) != best(x):
            row = family.row(i)
            total += float(mass[i]) * (expected_loss(row, spec, rule(x)) - expected_loss(row, spec, best(x)))
    return total


def mismatch_excess(Pj: JointDiscrete, Qj: JointDiscrete, spec: LossSpec) -> Tuple[float, List[BoundReport]]:
    """
    Excess risk of psi_Q under P and its 2B bounds.

    B_Q routes compare P with Q; B_P routes compare P with P_X x Q_{Y|X}.
    Every applicable report is checked against the excess.

    Raises:
        UndefinedConditionalException: psi_Q is undefined where P_X has mass.
        BoundViolationException: an applicable 2B is below the excess.
    """
    _require_same_labels(Pj, Qj)
    _, psi_p = conditional_entropy(Pj, spec)
    _, psi_q = conditional_entropy(Qj, spec)
    excess = _rule_gap(Pj, spec, psi_q, psi_p)
    if excess < -VIOLATION_TOL:
        raise BoundViolationException("Mismatch excess is negative", details={"excess": excess})
    excess = max(0.0, excess)

    reports: List[BoundReport] = [
        BoundReport(name="mismatch_excess", value=excess, applicable=True, citation="mismatch-excess", direction="value")
    ]
    for pair in _route_pairs(Pj, Qj, spec, "bq", "mismatch-excess-bq"):
        prefix = pair[0].name.rsplit(".", 1)[0]
        reports.append(_doubled(pair, f"excess_{prefix}", "mismatch-excess-bq"))

    Mj = mixed_joint(Pj, Qj)
    for pair in _route_pairs(Pj, Mj, spec, "bp", "mismatch-excess-bp"):
        prefix = pair[0].name.rsplit(".", 1)[0]
        reports.append(_doubled(pair, f"excess_{prefix}", "mismatch-excess-bp"))
    reports.append(_doubled(_per_x_tv(Pj, Mj, spec), "excess_bp_per_x_tv", "mismatch-excess-bp"))

    for report in reports[1:]:
        if report.applicable and excess > report.value + VIOLATION_TOL:
            raise BoundViolationException(
                "Mismatch excess exceeds its bound",
                details={"bound": report.name, "value": report.value, "excess": excess},
            )
    logger.debug("mismatch excess %.6g with %d bound reports", excess, len(reports) - 1)
    return excess, reports


# =============================================================================
# MISMATCHED ESTIMATOR IN GAUSSIAN NOISE
# =============================================================================

def _posterior_mean(prior: DiscreteDist, alpha: float, noise_std: float):
    y = prior.values()
    mask = prior.probs > 0
    y, log_w = y[mask], np.log(prior.probs[mask])

    def estimate(x: float) -> float:
        logits = log_w - (x - alpha * y) ** 2 / (2.0 * noise_std ** 2)
        weights = np.exp(logits - logsumexp(logits))
        return float(weights @ y)

    return estimate


def _observation_integral(prior: DiscreteDist, alpha: float, noise_std: float, integrand) -> float:
    """sum_y prior(y) * integral of N(x; alpha y, s^2) integrand(x, y) dx."""
    total = 0.0
    for y, p in zip(prior.values(), prior.probs):
        if p == 0:
            continue
        center = alpha * y
        lo, hi = center - 8.0 * noise_std, center + 8.0 * noise_std

        def density(x, y=y, center=center):
            return math.exp(-((x - center) ** 2) / (2.0 * noise_std ** 2)) / (math.sqrt(2.0 * math.pi) * noise_std) * integrand(x, y)

        value, _ = integrate.quad(density, lo, hi, points=[center], limit=200, epsabs=1e-10, epsrel=1e-8)
        total += float(p) * value
    return total


def mismatched_estimator_bound(
    P_Y: DiscreteDist,
    Q_Y: DiscreteDist,
    alpha: float,
    noise_std: float = 1.0,
) -> Tuple[float, float]:
    """
    Excess squared error of the Bayes estimator built for Q_Y when Y ~ P_Y
    and X = alpha Y + V, V ~ N(0, noise_std^2).

    The excess is E_P[(psi_P(X) - psi_Q(X))^2]; the bound is
    sqrt(E_Q[(Y - psi_Q(X))^4] chi^2(P_Y || Q_Y)) + sqrt(E_P[(Y - psi_P(X))^4] chi^2(Q_Y || P_Y)),
    both by quadrature over x.

    Returns:
        (excess, bound); the bound is +inf when a chi-square is infinite.

    Raises:
        BoundViolationException: excess above the bound beyond tolerance.
    """
    P_Y.require_same_support(Q_Y)
    if not noise_std > 0:
        raise ValidationException("Noise standard deviation must be positive", details={"noise_std": noise_std})
    psi_p = _posterior_mean(P_Y, alpha, noise_std)
    psi_q = _posterior_mean(Q_Y, alpha, noise_std)

    excess = _observation_integral(P_Y, alpha, noise_std, lambda x, y: (psi_p(x) - psi_q(x)) ** 2)
    fourth_q = _observation_integral(Q_Y, alpha, noise_std, lambda x, y: (y - psi_q(x)) ** 4)
    fourth_p = _observation_integral(P_Y, alpha, noise_std, lambda x, y: (y - psi_p(x)) ** 4)

    terms = []
    for fourth, divergence in ((fourth_q, chi2(P_Y, Q_Y)), (fourth_p, chi2(Q_Y, P_Y))):
        terms.append(math.inf if math.isinf(divergence) else math.sqrt(fourth * divergence))
    bound = sum(terms)

    if excess > bound + 1e-8:
        raise BoundViolationException(
            "Mismatched estimator excess exceeds its chi-square bound",
            details={"excess": excess, "bound": bound, "alpha": alpha},
        )
    logger.debug("mismatched estimator: excess %.6g, bound %.6g", excess, bound)
    return excess, bound
