"""
Pydantic Schemas for Input and Output Documents
===============================================

Every JSON document the CLI reads or writes goes through one of these
models. Input models validate shape and types and then build the domain
object with ``to_domain()``; domain constructors enforce the numeric
invariants (normalization, positivity, table shapes).

Distribution documents:
- discrete:  {"outcomes": [...], "probs": [...]}
- gaussian:  {"family": "gaussian", "mean": m, "variance": v}
- mixture:   {"family": "gaussian_mixture", "weights": [...], "means": [...], "variances": [...]}
- joint:     {"x": [...], "y": [...], "probs": [[...], ...]}
"""

from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from entropy_bounds.distributions.discrete import DiscreteDist, JointDiscrete, thaw_label
from entropy_bounds.distributions.gaussian import GaussianMixture, GaussianScalar
from entropy_bounds.entropy.generalized import EntropyResult
from entropy_bounds.losses.loss_spec import LOSS_KINDS, LossSpec


# =============================================================================
# DISTRIBUTIONS
# =============================================================================

class DiscreteDistSchema(BaseModel):
    """Finite distribution with labeled outcomes."""

    model_config = ConfigDict(extra="forbid")

    outcomes: List[Any] = Field(..., min_length=1)
    probs: List[float] = Field(..., min_length=1)

    def to_domain(self) -> DiscreteDist:
        return DiscreteDist.from_dict(self.model_dump())


class GaussianSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Literal["gaussian"]
    mean: float
    variance: float = Field(..., gt=0)

    def to_domain(self) -> GaussianScalar:
        return GaussianScalar(self.mean, self.variance)


class GaussianMixtureSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Literal["gaussian_mixture"]
    weights: List[float] = Field(..., min_length=1)
    means: List[float] = Field(..., min_length=1)
    variances: List[float] = Field(..., min_length=1)

    def to_domain(self) -> GaussianMixture:
        return GaussianMixture(np.array(self.weights), np.array(self.means), np.array(self.variances))


class JointDiscreteSchema(BaseModel):
    """Joint P_{X,Y} as a labeled |X| x |Y| matrix."""

    model_config = ConfigDict(extra="forbid")

    x: List[Any] = Field(..., min_length=1)
    y: List[Any] = Field(..., min_length=1)
    probs: List[List[float]]

    def to_domain(self) -> JointDiscrete:
        return JointDiscrete.from_dict(self.model_dump())


DistributionSchema = Union[GaussianSchema, GaussianMixtureSchema, DiscreteDistSchema]


def parse_distribution(data: Dict[str, Any]) -> Union[DiscreteDist, GaussianScalar, GaussianMixture]:
    """Dispatch on the ``family`` key; documents without one are discrete."""
    family = data.get("family") if isinstance(data, dict) else None
    schema = {"gaussian": GaussianSchema, "gaussian_mixture": GaussianMixtureSchema}.get(family, DiscreteDistSchema)
    return schema.model_validate(data).to_domain()


# =============================================================================
# LOSSES
# =============================================================================

class LossSpecSchema(BaseModel):
    """
    A loss as a canonical kind or an explicit table.

    ``table`` holds the |Z| x |A| loss values for kind ``table`` and the
    metric matrix for kind ``metric``.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: Literal[LOSS_KINDS]  # type: ignore[valid-type]
    table: Optional[List[List[float]]] = None
    outcomes: Optional[List[Any]] = None
    actions: Optional[List[Any]] = None
    value_range: Optional[Tuple[float, float]] = Field(None, alias="range")
    lipschitz: Optional[float] = Field(None, ge=0)
    domain: Optional[Tuple[float, float]] = None

    def to_domain(self) -> LossSpec:
        return LossSpec(
            kind=self.kind,
            table=None if self.table is None else np.array(self.table, dtype=float),
            outcomes=None if self.outcomes is None else tuple(self.outcomes),
            actions=None if self.actions is None else tuple(self.actions),
            value_range=self.value_range,
            lipschitz=self.lipschitz,
            domain=self.domain,
        )

    @classmethod
    def from_domain(cls, spec: LossSpec) -> "LossSpecSchema":
        return cls.model_validate(spec.to_dict())


def parse_loss(data: Union[str, Dict[str, Any]]) -> LossSpec:
    """A bare kind name (``"log"``) or a full loss document."""
    if isinstance(data, str):
        data = {"kind": data}
    return LossSpecSchema.model_validate(data).to_domain()


# =============================================================================
# OUTPUTS
# =============================================================================

class EntropyOutput(BaseModel):
    """Printed result of the ``entropy`` command."""

    value: float
    action: Any
    achieved: bool = True

    @classmethod
    def from_result(cls, result: EntropyResult, P) -> "EntropyOutput":
        action = result.optimal_action
        if isinstance(action, DiscreteDist):
            action = "self" if isinstance(P, DiscreteDist) and action.allclose(P) else action.to_dict()
        elif isinstance(action, (GaussianScalar, GaussianMixture)):
            action = "self" if action is P else action.to_dict()
        elif isinstance(action, (tuple, list)):
            action = thaw_label(tuple(action))
        elif isinstance(action, np.generic):
            action = action.item()
        return cls(value=result.value, action=action, achieved=result.achieved)


class ManifestSchema(BaseModel):
    """Provenance written next to experiment records."""

    experiment: str
    seed: int
    config: Dict[str, Any]
    config_sha256: str
    versions: Dict[str, str]
    files: Dict[str, str] = Field(default_factory=dict, description="file name -> sha256")
