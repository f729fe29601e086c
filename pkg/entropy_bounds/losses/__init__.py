"""Loss specifications, ranges, Lipschitz constants and metrics"""

from entropy_bounds.losses.loss_spec import (
    LOSS_KINDS,
    LossSpec,
    binary_classification_problem,
    check_lipschitz,
    eval_loss,
    lipschitz_constant,
    loss_column,
    loss_matrix,
    loss_range,
)
from entropy_bounds.losses.metrics import (
    default_metric,
    euclidean_metric,
    line_metric,
    validate_metric,
    zero_one_metric,
)

__all__ = [
    "LOSS_KINDS",
    "LossSpec",
    "binary_classification_problem",
    "check_lipschitz",
    "default_metric",
    "euclidean_metric",
    "eval_loss",
    "line_metric",
    "lipschitz_constant",
    "loss_column",
    "loss_matrix",
    "loss_range",
    "validate_metric",
    "zero_one_metric",
]
