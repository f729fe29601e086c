"""
Experiment Registry
===================

Maps each config model to the function that runs it. The two randomized
suites without a sample-size grid (``mismatch`` and ``mi_bounds``) live here;
the others delegate to the learning modules.
"""

import logging
from typing import Callable, Dict, Optional

import numpy as np
import pandas as pd

from entropy_bounds.bounds.mutual_information import mi_upper_bounds
from entropy_bounds.core.exceptions import BoundViolationException, ValidationException
from entropy_bounds.distributions.discrete import DiscreteDist, JointDiscrete
from entropy_bounds.distributions.sampling import rng_for
from entropy_bounds.experiments.config import (
    ErmSweepConfig,
    ExperimentBase,
    ExpfamConfig,
    LipschitzRateConfig,
    MerLinearConfig,
    MerNonlinearConfig,
    MiBoundsConfig,
    MismatchConfig,
)
from entropy_bounds.experiments.runner import ExperimentResult, TrialRunner
from entropy_bounds.learning.bayesian_mer import (
    GridRegressionModel,
    LinearGaussianModel,
    gaussian_grid_prior,
    mer_linear,
    mer_nonlinear_bound,
)
from entropy_bounds.learning.erm import erm_sweep, lipschitz_grid_problem, lipschitz_rate_check
from entropy_bounds.learning.expfam import ExpFamily, expfam_learning_experiment
from entropy_bounds.learning.mismatch import cond_entropy_diff_bounds, mismatch_excess, mismatched_estimator_bound
from entropy_bounds.losses.loss_spec import LossSpec

logger = logging.getLogger(__name__)

CITATIONS = {
    "erm_sweep": "erm-finite-z",
    "lipschitz_rate": "erm-lipschitz-wasserstein",
    "expfam": "expfam-projection-learning",
    "mer_linear": "bayesian-mer-linear",
    "mer_nonlinear": "bayesian-mer-smooth",
    "mismatch": "mismatch-excess",
    "mi_bounds": "mutual-information-bounds",
}

Runner = Callable[[ExperimentBase, TrialRunner], ExperimentResult]


def random_joint(rng: np.random.Generator, x_size: int, y_size: int) -> JointDiscrete:
    """Dirichlet(1) joint on {0..x_size-1} x {0..y_size-1}."""
    probs = rng.dirichlet(np.ones(x_size * y_size)).reshape(x_size, y_size)
    return JointDiscrete(tuple(range(x_size)), tuple(range(y_size)), probs)


def random_unit_table(rng: np.random.Generator, y_size: int, actions: Optional[int] = None) -> LossSpec:
    """Uniform [0, 1] loss table over Y = {0..y_size-1}."""
    actions = actions or y_size
    return LossSpec(
        "table",
        table=rng.uniform(size=(y_size, actions)),
        outcomes=tuple(range(y_size)),
        actions=tuple(range(actions)),
        value_range=(0.0, 1.0),
    )


# =============================================================================
# GRID EXPERIMENTS
# =============================================================================

def _run_erm(config: ErmSweepConfig, runner: TrialRunner) -> ExperimentResult:
    return erm_sweep(
        config.distribution.to_domain(),
        config.loss.to_domain(),
        config.n_grid,
        config.trials,
        config.seed,
        epsilons=config.epsilons,
        typical_epsilon=config.epsilon,
        runner=runner,
    )


def _run_lipschitz(config: LipschitzRateConfig, runner: TrialRunner) -> ExperimentResult:
    P, spec, metric, rho_f = lipschitz_grid_problem(
        p=config.p,
        x_points=config.x_points,
        y_levels=config.y_levels,
        b=config.b,
        action_points=config.action_points,
        slope=config.slope,
        loss=config.loss,
        seed=config.seed,
    )
    return lipschitz_rate_check(
        P, spec, metric, rho_f, config.n_grid, config.trials, config.seed, loss=config.loss, b=config.b, runner=runner
    )


def _run_expfam(config: ExpfamConfig, runner: TrialRunner) -> ExperimentResult:
    Pj = config.joint.to_domain()
    fam = ExpFamily.from_potential(Pj.flatten().outcomes, config.potential, config.base)
    return expfam_learning_experiment(
        Pj, fam, config.loss.to_domain(), config.n_grid, config.trials, config.seed, runner=runner
    )


def _run_mer_linear(config: MerLinearConfig, runner: TrialRunner) -> ExperimentResult:
    model = LinearGaussianModel.polynomial(config.x_values, config.degree, config.prior_var, config.noise_var)
    return mer_linear(model, config.n_grid, config.trials, config.seed, runner=runner)


REGRESSION_FUNCTIONS = {
    "sin": lambda x, w: np.sin(w * x),
    "linear": lambda x, w: w * x,
    "constant": lambda x, w: x + 0.0 * w,
}


def _run_mer_nonlinear(config: MerNonlinearConfig, runner: TrialRunner) -> ExperimentResult:
    w_grid = np.linspace(config.w_min, config.w_max, config.w_points)
    prior = None
    if config.prior == "gaussian":
        prior = gaussian_grid_prior(w_grid, config.prior_mean, config.prior_var)
    model = GridRegressionModel.from_function(
        REGRESSION_FUNCTIONS[config.function],
        DiscreteDist.uniform(tuple(config.x_values)),
        w_grid,
        prior=prior,
        noise_var=config.noise_var,
    )
    return mer_nonlinear_bound(model, config.n_grid, config.trials, config.seed, runner=runner)


# =============================================================================
# RANDOMIZED SUITES
# =============================================================================

def _run_mismatch(config: MismatchConfig, runner: TrialRunner) -> ExperimentResult:
    def joint_pair(t: int) -> dict:
        rng = rng_for(config.seed, t)
        Pj, Qj = random_joint(rng, config.x_size, config.y_size), random_joint(rng, config.x_size, config.y_size)
        spec = random_unit_table(rng, config.y_size)
        cond = cond_entropy_diff_bounds(Pj, Qj, spec)
        difference = cond[0].value
        failed = [r.name for r in cond if not r.holds(difference)]
        if failed:
            raise BoundViolationException(
                "Conditional-entropy bound violated", details={"trial": t, "bounds": failed, "difference": difference}
            )
        excess, reports = mismatch_excess(Pj, Qj, spec)
        record = {"kind": "joint_pair", "cond_difference": difference}
        record.update({r.name: r.value for r in cond[1:] if r.applicable and r.direction == "abs"})
        record["excess"] = excess
        record.update({r.name: r.value for r in reports[1:] if r.applicable})
        return record

    def estimator_pair(t: int) -> dict:
        rng = rng_for(config.seed, t)
        p, q = rng.uniform(0.05, 0.95, size=2)
        P_Y = DiscreteDist((-1, 1), np.array([1.0 - p, p]))
        Q_Y = DiscreteDist((-1, 1), np.array([1.0 - q, q]))
        excess, bound = mismatched_estimator_bound(P_Y, Q_Y, config.alpha, config.noise_std)
        return {"kind": "estimator_pair", "p": float(p), "q": float(q), "estimator_excess": excess, "estimator_bound": bound}

    pairs = pd.DataFrame(runner.run(joint_pair, config.trials, "mismatch joints"))
    estimators = pd.DataFrame(runner.run(estimator_pair, config.estimator_pairs, "mismatch estimator", config.trials))
    trials = pd.concat([pairs.assign(trial=np.arange(len(pairs))), estimators.assign(trial=np.arange(len(estimators)))])

    summary = {
        "pairs": config.trials,
        "max_abs_cond_difference": float(pairs["cond_difference"].abs().max()),
        "max_cond_kl_ratio": float((pairs["cond_difference"].abs() / pairs["cond_kl.abs"].where(pairs["cond_kl.abs"] > 0)).max()),
        "mean_excess": float(pairs["excess"].mean()),
        "max_excess_bq_ratio": float((pairs["excess"] / pairs["excess_bq_kl"].where(pairs["excess_bq_kl"] > 0)).max()),
        "max_excess_bp_ratio": float((pairs["excess"] / pairs["excess_bp_kl"].where(pairs["excess_bp_kl"] > 0)).max()),
        "estimator_pairs": config.estimator_pairs,
    }
    if config.estimator_pairs:
        summary["max_estimator_ratio"] = float((estimators["estimator_excess"] / estimators["estimator_bound"]).max())
    return ExperimentResult(pd.DataFrame([summary]), trials.reset_index(drop=True))


def _run_mi(config: MiBoundsConfig, runner: TrialRunner) -> ExperimentResult:
    def one_trial(t: int) -> dict:
        j = random_joint(rng_for(config.seed, t), config.x_size, config.z_size)
        reports = mi_upper_bounds(j)
        info = reports[0].value
        failed = [r.name for r in reports[1:] if r.applicable and info > r.value + 1e-12]
        if failed:
            raise BoundViolationException("Mutual-information bound violated", details={"trial": t, "bounds": failed})
        return {"mutual_information": info} | {r.name: r.value for r in reports[1:] if r.applicable}

    frame = pd.DataFrame(runner.run(one_trial, config.trials, "mi bounds"))
    frame.insert(0, "trial", np.arange(config.trials))
    summary = {"trials": config.trials} | {f"mean_{c}": float(frame[c].mean()) for c in frame.columns if c != "trial"}
    return ExperimentResult(pd.DataFrame([summary]), frame)


REGISTRY: Dict[str, Runner] = {
    "erm_sweep": _run_erm,
    "lipschitz_rate": _run_lipschitz,
    "expfam": _run_expfam,
    "mer_linear": _run_mer_linear,
    "mer_nonlinear": _run_mer_nonlinear,
    "mismatch": _run_mismatch,
    "mi_bounds": _run_mi,
}


def run_experiment(config: ExperimentBase, runner: Optional[TrialRunner] = None) -> ExperimentResult:
    """Run a validated config through its registered function."""
    name = getattr(config, "experiment", None)
    if name not in REGISTRY:
        raise ValidationException(f"Unknown experiment {name!r}", details={"valid": sorted(REGISTRY)})
    logger.info("running %s (seed %d, %d trials)", name, config.seed, config.trials)
    return REGISTRY[name](config, runner or TrialRunner())
