"""
Loss Specifications
===================

A loss l(z, a) is either a canonical kind or an explicit table.

Kinds:
------
- ``log``:       l(z, a) = -log a(z), actions are distributions over Z.
- ``quadratic``: l(z, a) = (z - a)^2 on the reals.
- ``absolute``:  l(z, a) = |z - a| on the reals.
- ``zero-one``:  l(z, a) = 1{z != a}, actions are the outcomes themselves.
- ``metric``:    l(z, a) = d(z, a) for a metric matrix d on Z (A = Z).
- ``table``:     l(z, a) = table[z, a] with labeled rows and columns.

The bound evaluators need two pieces of metadata per action: the range
[alpha_a, beta_a] of l(., a) over Z and its Lipschitz constant with respect
to a metric on Z. Both are computed exactly on finite supports.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Hashable, Optional, Sequence, Tuple

import numpy as np

from entropy_bounds.core.exceptions import NotApplicableException, ValidationException
from entropy_bounds.distributions.discrete import (
    DiscreteDist,
    JointDiscrete,
    freeze_label,
    thaw_label,
)
from entropy_bounds.losses.metrics import validate_metric

logger = logging.getLogger(__name__)

LOSS_KINDS = ("log", "quadratic", "zero-one", "absolute", "metric", "table")
REAL_KINDS = ("quadratic", "absolute")
FINITE_ACTION_KINDS = ("zero-one", "metric", "table")


@dataclass(frozen=True, eq=False)
class LossSpec:
    """
    Loss function with range and Lipschitz metadata.

    Attributes:
        kind: One of ``LOSS_KINDS``.
        table: |Z| x |A| loss values (``table``) or the metric matrix (``metric``).
        outcomes: Row labels; optional for canonical kinds.
        actions: Column labels for ``table``; equal to outcomes for ``metric``.
        value_range: Declared [alpha, beta] containing every loss value.
        lipschitz: Declared Lipschitz constant in z w.r.t. the metric in use.
        domain: Interval containing Z for ``quadratic``/``absolute``.
    """

    kind: str
    table: Optional[np.ndarray] = None
    outcomes: Optional[Tuple[Hashable, ...]] = None
    actions: Optional[Tuple[Hashable, ...]] = None
    value_range: Optional[Tuple[float, float]] = None
    lipschitz: Optional[float] = None
    domain: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValidationException(
                f"Unknown loss kind {self.kind!r}", details={"valid": list(LOSS_KINDS)}
            )
        if self.kind in ("table", "metric"):
            self._init_matrix()
        elif self.table is not None:
            raise ValidationException(f"Loss kind {self.kind!r} takes no table")
        elif self.outcomes is not None:
            object.__setattr__(self, "outcomes", tuple(freeze_label(o) for o in self.outcomes))

        if self.value_range is not None:
            lo, hi = (float(v) for v in self.value_range)
            if not lo <= hi:
                raise ValidationException("Declared range must satisfy alpha <= beta")
            object.__setattr__(self, "value_range", (lo, hi))
            if self.table is not None and (self.table.min() < lo - 1e-12 or self.table.max() > hi + 1e-12):
                raise ValidationException(
                    "Loss table leaves the declared range",
                    details={"range": [lo, hi], "min": float(self.table.min()), "max": float(self.table.max())},
                )
        if self.lipschitz is not None and not self.lipschitz >= 0:
            raise ValidationException("Lipschitz constant must be nonnegative")
        if self.domain is not None:
            lo, hi = (float(v) for v in self.domain)
            if self.kind not in REAL_KINDS or not lo <= hi:
                raise ValidationException("A domain interval applies to quadratic/absolute losses only")
            object.__setattr__(self, "domain", (lo, hi))

    def _init_matrix(self):
        if self.table is None:
            raise ValidationException(f"Loss kind {self.kind!r} needs a matrix")
        mat = np.array(self.table, dtype=float)
        if mat.ndim != 2 or mat.size == 0:
            raise ValidationException("Loss table must be a nonempty matrix")
        if not np.all(np.isfinite(mat)):
            raise ValidationException("Loss table entries must be finite")
        if self.kind == "metric":
            mat = validate_metric(mat)
        rows = tuple(range(mat.shape[0])) if self.outcomes is None else tuple(freeze_label(o) for o in self.outcomes)
        if self.kind == "metric":
            cols = rows
        else:
            cols = tuple(range(mat.shape[1])) if self.actions is None else tuple(freeze_label(a) for a in self.actions)
        if (len(rows), len(cols)) != mat.shape or len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ValidationException(
                "Loss labels must be distinct and match the matrix shape",
                details={"shape": list(mat.shape), "rows": len(rows), "cols": len(cols)},
            )
        mat.setflags(write=False)
        object.__setattr__(self, "table", mat)
        object.__setattr__(self, "outcomes", rows)
        object.__setattr__(self, "actions", cols)

    # -------------------------------------------------------------------------

    @classmethod
    def single_column(cls, column: Sequence[float], outcomes: Sequence[Hashable] | None = None) -> "LossSpec":
        col = np.asarray(column, dtype=float)[:, None]
        return cls("table", table=col, outcomes=None if outcomes is None else tuple(outcomes))

    @property
    def action_space(self) -> Any:
        if self.kind == "log":
            return "distributions over Z"
        if self.kind in REAL_KINDS:
            return "reals"
        if self.kind == "zero-one":
            return "outcomes of Z"
        return self.actions

    def has_finite_actions(self) -> bool:
        return self.kind in FINITE_ACTION_KINDS

    def row_index(self, outcomes: Sequence[Hashable]) -> np.ndarray:
        """Row of ``table`` for each outcome label of a distribution."""
        lookup = {o: i for i, o in enumerate(self.outcomes)}
        try:
            return np.array([lookup[freeze_label(o)] for o in outcomes], dtype=int)
        except KeyError as exc:
            raise ValidationException(
                "Outcome not covered by the loss table", details={"label": thaw_label(exc.args[0])}
            ) from exc

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind}
        if self.table is not None:
            data["table"] = self.table.tolist()
            data["outcomes"] = [thaw_label(o) for o in self.outcomes]
            if self.kind == "table":
                data["actions"] = [thaw_label(a) for a in self.actions]
        elif self.outcomes is not None:
            data["outcomes"] = [thaw_label(o) for o in self.outcomes]
        if self.value_range is not None:
            data["range"] = list(self.value_range)
        if self.lipschitz is not None:
            data["lipschitz"] = self.lipschitz
        if self.domain is not None:
            data["domain"] = list(self.domain)
        return data


# =============================================================================
# EVALUATION
# =============================================================================

def eval_loss(spec: LossSpec, z: Hashable, a: Any) -> float:
    """
    l(z, a) for a single outcome and action.

    Log loss at an outcome the action gives zero mass returns +inf.
    """
    if spec.kind == "log":
        if not isinstance(a, DiscreteDist):
            raise ValidationException("Log-loss actions are distributions")
        try:
            p = a.prob(z)
        except ValidationException:
            p = 0.0
        if p == 0.0:
            logger.debug("log loss is +inf at outcome %r", z)
            return math.inf
        return -math.log(p)
    if spec.kind == "quadratic":
        return (float(z) - float(a)) ** 2
    if spec.kind == "absolute":
        return abs(float(z) - float(a))
    if spec.kind == "zero-one":
        return 0.0 if freeze_label(z) == freeze_label(a) else 1.0
    row = spec.row_index([z])[0]
    try:
        col = spec.actions.index(freeze_label(a))
    except ValueError as exc:
        raise ValidationException("Unknown action", details={"action": a}) from exc
    return float(spec.table[row, col])


def loss_column(spec: LossSpec, outcomes: Sequence[Hashable], action: Any) -> np.ndarray:
    """Vector l(z, action) over the given outcomes."""
    if spec.kind == "log":
        if not isinstance(action, DiscreteDist):
            raise ValidationException("Log-loss actions are distributions")
        if tuple(outcomes) == action.outcomes:
            probs = np.asarray(action.probs)
        else:
            probs = np.array([action.prob(o) if o in action.outcomes else 0.0 for o in outcomes])
        with np.errstate(divide="ignore"):
            return -np.log(probs)
    if spec.kind in REAL_KINDS:
        z = np.asarray(outcomes, dtype=float)
        diff = z - float(action)
        return diff ** 2 if spec.kind == "quadratic" else np.abs(diff)
    if spec.kind == "zero-one":
        a = freeze_label(action)
        return np.array([0.0 if freeze_label(o) == a else 1.0 for o in outcomes])
    matrix, actions = loss_matrix(spec, outcomes)
    try:
        return matrix[:, actions.index(freeze_label(action))]
    except ValueError as exc:
        raise ValidationException("Unknown action", details={"action": action}) from exc


def loss_matrix(spec: LossSpec, outcomes: Sequence[Hashable]) -> Tuple[np.ndarray, Tuple[Hashable, ...]]:
    """
    Full |Z| x |A| matrix for finite action sets.

    Zero-one losses take A = Z, so the matrix is 1 - I over the given outcomes.
    """
    outcomes = tuple(freeze_label(o) for o in outcomes)
    if spec.kind == "zero-one":
        return 1.0 - np.eye(len(outcomes)), outcomes
    if spec.kind in ("table", "metric"):
        return spec.table[spec.row_index(outcomes)], spec.actions
    raise NotApplicableException(
        f"Loss kind {spec.kind!r} has no finite action set", details={"kind": spec.kind}
    )


# =============================================================================
# RANGE AND LIPSCHITZ METADATA
# =============================================================================

def loss_range(spec: LossSpec, action: Any, support: Sequence[Hashable] | None = None) -> Tuple[float, float]:
    """
    Tight [alpha, beta] of l(., action) over Z.

    Z is ``support`` when given, else the loss's own outcome labels. Without
    a finite Z the declared range is used, then the canonical interval
    implied by a declared domain.

    Raises:
        NotApplicableException: if the loss is unbounded on Z.
    """
    z = support if support is not None else spec.outcomes
    if z is not None:
        col = loss_column(spec, z, action)
        if not np.all(np.isfinite(col)):
            raise NotApplicableException(
                "Loss is unbounded at this action",
                details={"kind": spec.kind, "n_infinite": int(np.sum(~np.isfinite(col)))},
            )
        return float(col.min()), float(col.max())
    if spec.value_range is not None:
        return spec.value_range
    if spec.kind == "zero-one":
        return 0.0, 1.0
    if spec.domain is not None:
        lo, hi = spec.domain
        width = hi - lo
        return (0.0, width ** 2) if spec.kind == "quadratic" else (0.0, width)
    raise NotApplicableException(
        "Unbounded loss without a declared range", details={"kind": spec.kind}
    )


def lipschitz_constant(
    spec: LossSpec,
    action: Any,
    outcomes: Sequence[Hashable],
    metric: np.ndarray,
) -> float:
    """
    Smallest rho with |l(z, a) - l(z', a)| <= rho d(z, z') over all pairs.

    Raises:
        NotApplicableException: if l(., a) takes infinite values.
        ValidationException: if a declared constant is smaller than the tight one.
    """
    col = loss_column(spec, outcomes, action)
    if not np.all(np.isfinite(col)):
        raise NotApplicableException("No Lipschitz certificate for an unbounded loss")
    d = np.asarray(metric, dtype=float)
    if d.shape != (len(col), len(col)):
        raise ValidationException("Metric shape does not match the support")
    off = ~np.eye(len(col), dtype=bool)
    rho = float(np.max(np.abs(col[:, None] - col[None, :])[off] / d[off])) if len(col) > 1 else 0.0
    if spec.lipschitz is not None and rho > spec.lipschitz + 1e-12:
        raise ValidationException(
            "Declared Lipschitz constant is violated",
            details={"declared": spec.lipschitz, "tight": rho},
        )
    return rho


def check_lipschitz(spec: LossSpec, outcomes: Sequence[Hashable], metric: np.ndarray) -> bool:
    """Exhaustive pair check of the declared constant over every action."""
    if spec.lipschitz is None:
        raise ValidationException("No declared Lipschitz constant to check")
    _, actions = loss_matrix(spec, outcomes)
    try:
        for a in actions:
            lipschitz_constant(spec, a, outcomes, metric)
    except ValidationException:
        return False
    return True


# =============================================================================
# ENCODINGS
# =============================================================================

def binary_classification_problem(joint: JointDiscrete, max_features: int = 12) -> Tuple[DiscreteDist, LossSpec]:
    """
    Encode binary classification as a finite ERM problem.

    Z = X x {0, 1}, A = all 2^|X| mappings f: X -> {0, 1}, and
    l((x, y), f) = 1{f(x) != y}. Each action label is the tuple (f(x))_x.
    """
    if len(joint.y_outcomes) != 2:
        raise ValidationException("Binary classification needs exactly two labels")
    k = len(joint.x_outcomes)
    if k > max_features:
        raise ValidationException("Too many x values for the all-mappings class", details={"n_x": k})
    dist = joint.flatten()
    mappings = list(itertools.product((0, 1), repeat=k))
    table = np.empty((len(dist), len(mappings)))
    for col, f in enumerate(mappings):
        for i in range(k):
            for j in range(2):
                table[i * 2 + j, col] = 0.0 if f[i] == j else 1.0
    spec = LossSpec("table", table=table, outcomes=dist.outcomes, actions=tuple(mappings), value_range=(0.0, 1.0))
    return dist, spec
