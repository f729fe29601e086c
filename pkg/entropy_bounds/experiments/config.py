"""
Experiment Configuration
========================

Experiments are described by JSON documents validated into one of the models
below; the ``experiment`` field selects the model. Keys mirror the CLI flags,
so ``--seed``, ``--trials`` and ``--epsilon`` override them.

    {"experiment": "mer_linear", "trials": 50, "n_grid": [1, 2, 4, 8]}
"""

from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

from entropy_bounds.core.config import settings
from entropy_bounds.schemas import DiscreteDistSchema, JointDiscreteSchema, LossSpecSchema


def _doubling(start: int, stop: int) -> List[int]:
    grid, n = [], start
    while n <= stop:
        grid.append(n)
        n *= 2
    return grid


class ExperimentBase(BaseModel):
    """Fields shared by every experiment."""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0)
    trials: int = Field(100, ge=1)

    def overridden(self, **overrides: Any) -> "ExperimentBase":
        """Copy with the non-None overrides applied and re-validated."""
        data = self.model_dump(by_alias=True)
        data.update({k: v for k, v in overrides.items() if v is not None and k in type(self).model_fields})
        return type(self).model_validate(data)


class GridExperiment(ExperimentBase):
    n_grid: List[int]

    @field_validator("n_grid")
    @classmethod
    def check_grid(cls, v: List[int]) -> List[int]:
        if not v or any(n < 1 for n in v):
            raise ValueError("n_grid must be a nonempty list of positive sample sizes")
        return v


# -----------------------------------------------------------------------------
# Frequentist learning
# -----------------------------------------------------------------------------

class ErmSweepConfig(GridExperiment):
    """Finite-Z ERM: mean excess risk and exceedance frequencies per n."""

    experiment: Literal["erm_sweep"]
    distribution: DiscreteDistSchema
    loss: LossSpecSchema
    n_grid: List[int] = Field(default_factory=lambda: [25, 100, 400, 1600])
    epsilons: List[float] = Field(default_factory=lambda: [0.3])
    epsilon: float = Field(default_factory=lambda: settings.DEFAULT_EPSILON, gt=0)


class LipschitzRateConfig(GridExperiment):
    """W1 decay and the Wasserstein excess-risk bound on a grid support."""

    experiment: Literal["lipschitz_rate"]
    p: Literal[2, 3] = 2
    x_points: int = Field(4, ge=2)
    y_levels: int = Field(4, ge=2)
    b: float = Field(1.0, gt=0)
    action_points: int = Field(3, ge=1)
    slope: float = Field(1.0, gt=0)
    loss: Literal["absolute", "squared"] = "absolute"
    n_grid: List[int] = Field(default_factory=lambda: _doubling(8, 256))


# -----------------------------------------------------------------------------
# Decisions under drift
# -----------------------------------------------------------------------------

class ExpfamConfig(GridExperiment):
    """Plug-in rule of the exponential-family MLE on Z = X x Y (row-major)."""

    experiment: Literal["expfam"]
    joint: JointDiscreteSchema
    potential: List[List[float]]
    base: Optional[List[float]] = None
    loss: LossSpecSchema
    n_grid: List[int] = Field(default_factory=lambda: _doubling(8, 1024))


class MismatchConfig(ExperimentBase):
    """Random joint pairs for the conditional and mismatch bounds, plus estimator pairs."""

    experiment: Literal["mismatch"]
    x_size: int = Field(3, ge=1)
    y_size: int = Field(3, ge=2)
    trials: int = Field(500, ge=1)
    estimator_pairs: int = Field(20, ge=0)
    alpha: float = 1.0
    noise_std: float = Field(1.0, gt=0)


class MiBoundsConfig(ExperimentBase):
    """Random strictly positive joints for the mutual-information bounds."""

    experiment: Literal["mi_bounds"]
    x_size: int = Field(3, ge=2)
    z_size: int = Field(3, ge=2)
    trials: int = Field(1000, ge=1)


# -----------------------------------------------------------------------------
# Bayesian learning
# -----------------------------------------------------------------------------

class MerLinearConfig(GridExperiment):
    """Polynomial features on a uniform design; degree 0 at x = 0 is the scalar model."""

    experiment: Literal["mer_linear"]
    x_values: List[float] = Field(default_factory=lambda: [0.0])
    degree: int = Field(0, ge=0)
    prior_var: float = Field(1.0, gt=0)
    noise_var: float = Field(1.0, gt=0)
    n_grid: List[int] = Field(default_factory=lambda: list(range(1, 65)))


class MerNonlinearConfig(GridExperiment):
    """Tabulated g(x, w) on an equispaced w grid with exact posteriors."""

    experiment: Literal["mer_nonlinear"]
    function: Literal["sin", "linear", "constant"] = "sin"
    x_values: List[float] = Field(default_factory=lambda: [-1.0, -0.5, 0.5, 1.0])
    w_min: float = 0.0
    w_max: float = 3.141592653589793
    w_points: int = Field(401, ge=3, le=1000)
    prior: Literal["uniform", "gaussian"] = "uniform"
    prior_mean: float = 0.0
    prior_var: float = Field(1.0, gt=0)
    noise_var: float = Field(1.0, gt=0)
    trials: int = Field(200, ge=1)
    n_grid: List[int] = Field(default_factory=lambda: [1, 4, 16, 64])


ExperimentConfig = Annotated[
    Union[
        ErmSweepConfig,
        LipschitzRateConfig,
        ExpfamConfig,
        MismatchConfig,
        MiBoundsConfig,
        MerLinearConfig,
        MerNonlinearConfig,
    ],
    Field(discriminator="experiment"),
]

EXPERIMENT_NAMES = (
    "erm_sweep",
    "lipschitz_rate",
    "expfam",
    "mer_linear",
    "mer_nonlinear",
    "mismatch",
    "mi_bounds",
)

_adapter: TypeAdapter = TypeAdapter(ExperimentConfig)


def parse_experiment_config(data: Dict[str, Any]) -> ExperimentBase:
    """Validate a config document into its experiment model."""
    return _adapter.validate_python(data)
