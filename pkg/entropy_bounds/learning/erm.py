"""
Empirical Risk Minimization
===========================

ERM picks the action with the smallest average loss on the sample. Its
excess risk is controlled by entropy continuity: for any bound B on
|H(P_hat_n) - H(P)| built from the expected-loss comparison,

    R_excess = E_P l(Z, a_hat) - H(P) <= 2B

and in particular R_excess <= 2 d_{A,l}(P_hat_n, P). With Z finite and
l in [0, 1] this gives

    E[R_excess] <= sqrt(|Z| / n)
    P[R_excess > eps] <= exp{-n (eps^2 / 2 - |Z| log(n + 1) / n)}

For losses that are Lipschitz in z = (x, y) the Wasserstein route gives
R_excess <= 2 sqrt(2) (rho_f v 1) W1(P_hat_n, P) for |y - f(x, a)| and
8 sqrt(2) b (rho_f v 1) W1 for (y - f(x, a))^2.
"""

import itertools
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Hashable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from entropy_bounds.core.config import settings
from entropy_bounds.core.exceptions import BoundViolationException, ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist, thaw_label
from entropy_bounds.distributions.sampling import (
    empirical,
    empirical_from_indices,
    rng_for,
    sample_indices,
)
from entropy_bounds.divergence.f_divergences import kl, tv
from entropy_bounds.divergence.transport import wasserstein1_discrete
from entropy_bounds.entropy.generalized import argmin_tiebreak
from entropy_bounds.experiments.runner import ExperimentResult, TrialRunner
from entropy_bounds.losses.loss_spec import LossSpec, lipschitz_constant, loss_matrix
from entropy_bounds.losses.metrics import euclidean_metric

logger = logging.getLogger(__name__)

EXCESS_TOL = 1e-10
LIPSCHITZ_LOSSES = ("absolute", "squared")


@dataclass(frozen=True)
class ErmRun:
    """
    One ERM run against a known population.

    Attributes:
        n: Sample size.
        hypothesis: Index of the chosen action (lowest index among ties).
        action: Label of the chosen action.
        empirical_entropy: H(P_hat_n), the minimum empirical risk.
        population_entropy: H(P).
        excess_risk: E_P l(Z, a_hat) - H(P).
        tv_to_truth: d_TV(P_hat_n, P).
        kl_to_truth: D(P_hat_n || P).
        semidistance: d_{A,l}(P_hat_n, P).
        typical: semidistance <= epsilon.
    """

    n: int
    hypothesis: int
    action: Any
    empirical_entropy: float
    population_entropy: float
    excess_risk: float
    tv_to_truth: float
    kl_to_truth: float
    semidistance: float
    typical: bool

    def to_record(self) -> dict:
        record = asdict(self)
        record["action"] = str(thaw_label(self.action))
        return record


def _require_finite_actions(spec: LossSpec) -> None:
    if not spec.has_finite_actions():
        raise ValidationException("ERM needs a finite action set", details={"kind": spec.kind})


def erm_from_empirical(
    P: DiscreteDist,
    P_hat: DiscreteDist,
    spec: LossSpec,
    n: int,
    epsilon: Optional[float] = None,
) -> ErmRun:
    """
    ERM on a given empirical distribution, scored exactly against P.

    Raises:
        BoundViolationException: if excess risk exceeds 2 d_{A,l}(P_hat_n, P).
    """
    _require_finite_actions(spec)
    P.require_same_support(P_hat)
    epsilon = settings.DEFAULT_EPSILON if epsilon is None else epsilon
    matrix, actions = loss_matrix(spec, P.outcomes)

    empirical_risks = P_hat.probs @ matrix
    population_risks = P.probs @ matrix
    j = argmin_tiebreak(empirical_risks)
    population_entropy = float(population_risks.min())
    excess = float(population_risks[j]) - population_entropy
    semidistance = float(np.max(np.abs(empirical_risks - population_risks)))

    if excess < -EXCESS_TOL or excess > 2.0 * semidistance + EXCESS_TOL:
        raise BoundViolationException(
            "ERM excess risk outside [0, 2 d_{A,l}]",
            details={"excess": excess, "semidistance": semidistance, "n": n},
        )
    return ErmRun(
        n=n,
        hypothesis=j,
        action=actions[j],
        empirical_entropy=float(empirical_risks[j]),
        population_entropy=population_entropy,
        excess_risk=max(0.0, excess),
        tv_to_truth=tv(P_hat, P),
        kl_to_truth=kl(P_hat, P),
        semidistance=semidistance,
        typical=semidistance <= epsilon,
    )


def erm(
    P: DiscreteDist,
    spec: LossSpec,
    n: int,
    seed: int,
    trial: int = 0,
    epsilon: Optional[float] = None,
) -> ErmRun:
    """Draw n samples from P with the (seed, trial) stream and run ERM."""
    if n <= 0:
        raise ValidationException("ERM needs at least one sample", details={"n": n})
    indices = sample_indices(P, n, rng_for(seed, trial))
    return erm_from_empirical(P, empirical_from_indices(indices, P.outcomes), spec, n, epsilon)


def erm_from_samples(
    P: DiscreteDist,
    spec: LossSpec,
    samples: Sequence[Hashable],
    epsilon: Optional[float] = None,
) -> ErmRun:
    """ERM on an explicit dataset; used to force a particular P_hat_n."""
    return erm_from_empirical(P, empirical(samples, P.outcomes), spec, len(samples), epsilon)


# =============================================================================
# FINITE-Z SWEEP
# =============================================================================

def theorem_curve(support_size: int, n: int) -> float:
    """sqrt(|Z| / n)."""
    return math.sqrt(support_size / n)


def deviation_bound(support_size: int, n: int, eps: float) -> float:
    """exp{-n(eps^2/2 - |Z| log(n+1)/n)}, capped at 1."""
    exponent = -n * (eps ** 2 / 2.0 - support_size * math.log(n + 1) / n)
    return 1.0 if exponent >= 0 else math.exp(exponent)


def _require_unit_loss(spec: LossSpec, outcomes) -> None:
    matrix, _ = loss_matrix(spec, outcomes)
    if matrix.min() < 0.0 or matrix.max() > 1.0:
        raise ValidationException(
            "Loss must take values in [0, 1]",
            details={"min": float(matrix.min()), "max": float(matrix.max())},
        )


def erm_sweep(
    P: DiscreteDist,
    spec: LossSpec,
    n_grid: Sequence[int],
    trials: int,
    seed: int,
    epsilons: Sequence[float] = (0.1,),
    typical_epsilon: Optional[float] = None,
    runner: Optional[TrialRunner] = None,
) -> ExperimentResult:
    """
    Monte Carlo check of the finite-Z excess-risk theorem.

    Summary columns per n: mean_excess, mean_tv, mean_semidistance,
    theorem_curve, typical_fraction, and for every eps an empirical
    exceedance frequency ``exceed_<eps>`` next to ``deviation_bound_<eps>``.
    """
    _require_finite_actions(spec)
    _require_unit_loss(spec, P.outcomes)
    runner = runner or TrialRunner()
    k = len(P)
    rows, summary = [], []

    for block, n in enumerate(n_grid):
        runs = runner.run(
            lambda t, n=n: erm(P, spec, n, seed, trial=t, epsilon=typical_epsilon),
            trials,
            desc=f"erm n={n}",
            offset=block * trials,
        )
        frame = pd.DataFrame([r.to_record() for r in runs])
        frame.insert(1, "trial", np.arange(trials))
        rows.append(frame)

        excess = frame["excess_risk"].to_numpy()
        entry = {
            "n": n,
            "mean_excess": float(np.mean(excess)),
            "mean_tv": float(frame["tv_to_truth"].mean()),
            "mean_semidistance": float(frame["semidistance"].mean()),
            "theorem_curve": theorem_curve(k, n),
            "typical_fraction": float(frame["typical"].mean()),
        }
        for eps in epsilons:
            entry[f"exceed_{eps:g}"] = float(np.mean(excess > eps))
            entry[f"deviation_bound_{eps:g}"] = deviation_bound(k, n, eps)
        summary.append(entry)
        logger.info("erm n=%d mean excess %.4g (curve %.4g)", n, entry["mean_excess"], entry["theorem_curve"])

    return ExperimentResult(pd.DataFrame(summary), pd.concat(rows, ignore_index=True))


# =============================================================================
# LIPSCHITZ LOSSES ON A GRID
# =============================================================================

def lipschitz_grid_problem(
    p: int = 2,
    x_points: int = 4,
    y_levels: int = 4,
    b: float = 1.0,
    action_points: int = 3,
    slope: float = 1.0,
    loss: str = "absolute",
    seed: int = 0,
) -> Tuple[DiscreteDist, LossSpec, np.ndarray, float]:
    """
    A desk-scale regression problem with Z = X x Y on a grid in R^(p+1).

    X is the grid {-1, ..., 1}^p with ``x_points`` per axis, Y has ``y_levels``
    values in [-b, b], actions a are a grid in [-slope, slope]^p and
    f(x, a) = clip(a . x, -b, b), which is |a|-Lipschitz in x. P has
    Dirichlet(1) weights drawn from the (seed, 0, 1) stream, apart from every trial stream.

    Returns:
        (P, loss table, Euclidean metric on Z, rho_f)
    """
    if p not in (2, 3):
        raise ValidationException("Grid dimension p must be 2 or 3", details={"p": p})
    if loss not in LIPSCHITZ_LOSSES:
        raise ValidationException(f"Unknown Lipschitz loss {loss!r}", details={"valid": list(LIPSCHITZ_LOSSES)})
    axis = np.linspace(-1.0, 1.0, x_points)
    xs = np.array(list(itertools.product(axis, repeat=p)))
    ys = np.linspace(-b, b, y_levels)
    points = np.array([np.append(x, y) for x in xs for y in ys])

    a_axis = np.linspace(-slope, slope, action_points)
    actions = np.array(list(itertools.product(a_axis, repeat=p)))
    fitted = np.clip(points[:, :p] @ actions.T, -b, b)
    residual = np.abs(points[:, p:p + 1] - fitted)
    table = residual if loss == "absolute" else residual ** 2

    outcomes = tuple(tuple(float(v) for v in z) for z in points)
    labels = tuple(tuple(float(v) for v in a) for a in actions)
    weights = rng_for(seed, 0, 1).dirichlet(np.ones(len(outcomes)))
    P = DiscreteDist(outcomes, weights)
    spec = LossSpec("table", table=table, outcomes=outcomes, actions=labels)
    rho_f = float(np.max(np.linalg.norm(actions, axis=1)))
    return P, spec, euclidean_metric(points), rho_f


def lipschitz_factor(rho_f: float, loss: str = "absolute", b: float = 1.0) -> float:
    """2 sqrt(2) (rho_f v 1) for |y - f|, 8 sqrt(2) b (rho_f v 1) for (y - f)^2."""
    base = math.sqrt(2.0) * max(rho_f, 1.0)
    return 2.0 * base if loss == "absolute" else 8.0 * b * base


def lipschitz_rate_check(
    P: DiscreteDist,
    spec: LossSpec,
    metric: np.ndarray,
    rho_f: float,
    n_grid: Sequence[int],
    trials: int,
    seed: int,
    loss: str = "absolute",
    b: float = 1.0,
    runner: Optional[TrialRunner] = None,
) -> ExperimentResult:
    """
    Mean W1(P_hat_n, P) and excess risk per n with a fitted log-log exponent.

    Every trial checks R_excess <= factor * W1 with the factor from
    ``lipschitz_factor``; the tight Lipschitz constant of the table is
    reported next to it. The absolute constant of the rate is not checked.
    """
    _require_finite_actions(spec)
    runner = runner or TrialRunner()
    factor = lipschitz_factor(rho_f, loss, b)
    _, actions = loss_matrix(spec, P.outcomes)
    tight_rho = max(lipschitz_constant(spec, a, P.outcomes, metric) for a in actions)
    if 2.0 * tight_rho > factor + 1e-9:
        raise ValidationException(
            "Loss table is steeper than the declared rho_f allows",
            details={"tight": tight_rho, "factor": factor},
        )

    def one_trial(t: int, n: int) -> dict:
        P_hat = empirical_from_indices(sample_indices(P, n, rng_for(seed, t)), P.outcomes)
        run = erm_from_empirical(P, P_hat, spec, n)
        w1 = wasserstein1_discrete(P_hat, P, metric).cost
        if run.excess_risk > factor * w1 + EXCESS_TOL:
            raise BoundViolationException(
                "Excess risk exceeds the Wasserstein bound",
                details={"excess": run.excess_risk, "w1": w1, "factor": factor},
            )
        return {"n": n, "excess_risk": run.excess_risk, "w1": w1, "wasserstein_bound": factor * w1}

    rows, summary = [], []
    for block, n in enumerate(n_grid):
        frame = pd.DataFrame(runner.run(lambda t, n=n: one_trial(t, n), trials, f"lipschitz n={n}", block * trials))
        frame.insert(1, "trial", np.arange(trials))
        rows.append(frame)
        summary.append(
            {
                "n": n,
                "mean_w1": float(frame["w1"].mean()),
                "mean_excess": float(frame["excess_risk"].mean()),
                "mean_wasserstein_bound": float(frame["wasserstein_bound"].mean()),
            }
        )

    table = pd.DataFrame(summary)
    slope, _ = np.polyfit(np.log(table["n"]), np.log(table["mean_w1"]), 1)
    p = len(P.outcomes[0]) - 1
    table["fitted_exponent"] = float(slope)
    table["theorem_exponent"] = -1.0 / (p + 1)
    table["lipschitz_factor"] = factor
    table["tight_lipschitz"] = tight_rho
    logger.info("W1 decay exponent %.3f (theorem %.3f)", slope, -1.0 / (p + 1))
    return ExperimentResult(table, pd.concat(rows, ignore_index=True))


def binary_classification_curve(n_x: int, n: int) -> Tuple[float, float]:
    """sqrt(2|X| / n) from the finite-Z theorem and the Rademacher 8 sqrt(|X| log 2 / n)."""
    return math.sqrt(2.0 * n_x / n), 8.0 * math.sqrt(n_x * math.log(2.0) / n)
