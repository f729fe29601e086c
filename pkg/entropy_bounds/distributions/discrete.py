"""
Finite Discrete Distributions
=============================

Every exact computation in the library runs on finite supports. A
``DiscreteDist`` is an ordered list of outcome labels with a probability
vector of the same length; a ``JointDiscrete`` is a |X| x |Y| matrix with
labeled rows and columns.

Conventions:
------------
- Probabilities are 64-bit floats. A vector whose sum is within
  ``NORMALIZATION_TOL`` of 1 is renormalized; anything further off is rejected.
- Zero-probability outcomes stay in the support. KL and chi-square need them
  to detect support violations, and the max/min probability ratios used by
  the log-loss bounds need them too.
- Labels are opaque. JSON lists become tuples so that grid points in R^k
  stay hashable.
"""

from dataclasses import dataclass, field
from numbers import Real
from typing import Any, Dict, Hashable, Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

from entropy_bounds.core.config import settings
from entropy_bounds.core.exceptions import (
    UndefinedConditionalException,
    ValidationException,
)


def freeze_label(label: Any) -> Hashable:
    """Turn JSON lists (grid points) into tuples, leave scalars alone."""
    if isinstance(label, (list, tuple)):
        return tuple(freeze_label(v) for v in label)
    if isinstance(label, np.generic):
        return label.item()
    return label


def thaw_label(label: Hashable) -> Any:
    """Inverse of ``freeze_label`` for JSON output."""
    if isinstance(label, tuple):
        return [thaw_label(v) for v in label]
    return label


def _is_number(label: Any) -> bool:
    return isinstance(label, Real) and not isinstance(label, bool)


def _validated_probs(probs: Any, expected_len: int | None = None) -> np.ndarray:
    arr = np.array(probs, dtype=float)
    if expected_len is not None and arr.shape != (expected_len,):
        raise ValidationException(
            "Probability vector length does not match outcomes",
            details={"n_outcomes": expected_len, "shape": list(arr.shape)},
        )
    if arr.size == 0:
        raise ValidationException("Distribution needs at least one outcome")
    if not np.all(np.isfinite(arr)):
        raise ValidationException("Probabilities must be finite")
    if np.any(arr < 0):
        raise ValidationException(
            "Probabilities must be nonnegative",
            details={"min_prob": float(arr.min())},
        )
    total = float(arr.sum())
    if abs(total - 1.0) > settings.NORMALIZATION_TOL:
        raise ValidationException(
            "Probabilities must sum to 1",
            details={"sum": total, "tolerance": settings.NORMALIZATION_TOL},
        )
    arr = arr / total
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteDist:
    """
    Finite-support probability vector with labeled outcomes.

    Attributes:
        outcomes: Distinct outcome labels in a stable order.
        probs: Nonnegative weights summing to 1 (read-only array).
    """

    outcomes: Tuple[Hashable, ...]
    probs: np.ndarray
    _index: Dict[Hashable, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        outcomes = tuple(freeze_label(o) for o in self.outcomes)
        index = {o: i for i, o in enumerate(outcomes)}
        if len(index) != len(outcomes):
            raise ValidationException("Outcome labels must be distinct")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probs", _validated_probs(self.probs, len(outcomes)))
        object.__setattr__(self, "_index", index)

    # -------------------------------------------------------------------------
    # Constructors
    # -------------------------------------------------------------------------

    @classmethod
    def uniform(cls, outcomes: Sequence[Hashable]) -> "DiscreteDist":
        k = len(outcomes)
        return cls(tuple(outcomes), np.full(k, 1.0 / k))

    @classmethod
    def point_mass(cls, outcomes: Sequence[Hashable], at: Hashable) -> "DiscreteDist":
        outcomes = tuple(freeze_label(o) for o in outcomes)
        probs = np.zeros(len(outcomes))
        probs[outcomes.index(freeze_label(at))] = 1.0
        return cls(outcomes, probs)

    @classmethod
    def bernoulli(cls, p: float) -> "DiscreteDist":
        """Bernoulli(p) on outcomes (0, 1)."""
        if not 0.0 <= p <= 1.0:
            raise ValidationException("Bernoulli parameter outside [0, 1]", details={"p": p})
        return cls((0, 1), np.array([1.0 - p, p]))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscreteDist":
        """Build from the JSON shape ``{"outcomes": [...], "probs": [...]}``."""
        try:
            return cls(tuple(data["outcomes"]), data["probs"])
        except KeyError as exc:
            raise ValidationException(f"Missing key {exc.args[0]!r} in distribution") from exc

    def to_dict(self) -> Dict[str, Any]:
        return {
            "outcomes": [thaw_label(o) for o in self.outcomes],
            "probs": [float(p) for p in self.probs],
        }

    # -------------------------------------------------------------------------
    # Accessors
    # -------------------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.outcomes)

    def index(self, label: Hashable) -> int:
        try:
            return self._index[freeze_label(label)]
        except KeyError as exc:
            raise ValidationException(
                "Outcome not in support", details={"label": label}
            ) from exc

    def prob(self, label: Hashable) -> float:
        return float(self.probs[self.index(label)])

    @property
    def is_numeric(self) -> bool:
        return all(_is_number(o) for o in self.outcomes)

    def values(self) -> np.ndarray:
        """Outcomes as a float vector; requires real-valued labels."""
        if not self.is_numeric:
            raise ValidationException(
                "Operation needs real-valued outcomes",
                details={"outcomes": [thaw_label(o) for o in self.outcomes[:5]]},
            )
        return np.array(self.outcomes, dtype=float)

    def points(self) -> np.ndarray:
        """Outcomes as an (n, k) array; scalars give k = 1."""
        if self.is_numeric:
            return self.values()[:, None]
        try:
            pts = np.array([np.atleast_1d(np.asarray(o, dtype=float)) for o in self.outcomes])
        except (TypeError, ValueError) as exc:
            raise ValidationException("Outcomes are not numeric points") from exc
        if pts.ndim != 2:
            raise ValidationException("Outcome points have ragged dimensions")
        return pts

    def mean(self) -> float:
        return float(self.probs @ self.values())

    def second_moment(self) -> float:
        return float(self.probs @ self.values() ** 2)

    def variance(self) -> float:
        z = self.values()
        return float(self.probs @ (z - self.probs @ z) ** 2)

    # -------------------------------------------------------------------------
    # Comparisons and combinations
    # -------------------------------------------------------------------------

    def same_support(self, other: "DiscreteDist") -> bool:
        return self.outcomes == other.outcomes

    def require_same_support(self, other: "DiscreteDist") -> None:
        if not self.same_support(other):
            raise ValidationException(
                "Distributions must share the same ordered support",
                details={"left": len(self), "right": len(other)},
            )

    def allclose(self, other: "DiscreteDist", atol: float = 1e-12) -> bool:
        return self.same_support(other) and bool(np.allclose(self.probs, other.probs, rtol=0.0, atol=atol))

    def mix(self, other: "DiscreteDist", weight: float) -> "DiscreteDist":
        """``weight * self + (1 - weight) * other``."""
        self.require_same_support(other)
        return DiscreteDist(self.outcomes, weight * self.probs + (1.0 - weight) * other.probs)

    def reorder(self, outcomes: Sequence[Hashable]) -> "DiscreteDist":
        """Re-express over a superset support, padding with zero mass."""
        probs = np.zeros(len(outcomes))
        target = {freeze_label(o): i for i, o in enumerate(outcomes)}
        for label, p in zip(self.outcomes, self.probs):
            if label not in target:
                raise ValidationException("Support is not a superset", details={"label": label})
            probs[target[label]] = p
        return DiscreteDist(tuple(outcomes), probs)

    def __repr__(self) -> str:
        body = ", ".join(f"{o!r}: {p:.4g}" for o, p in zip(self.outcomes, self.probs))
        return f"DiscreteDist({{{body}}})"


class Marginals(NamedTuple):
    """Result of ``JointDiscrete.marginals``."""

    p_x: DiscreteDist
    p_y: DiscreteDist
    conditionals: "ConditionalFamily"


@dataclass(frozen=True, eq=False)
class ConditionalFamily:
    """
    Indexed family P_{Y|X=x}. Rows at zero-mass x are flagged undefined.
    """

    x_outcomes: Tuple[Hashable, ...]
    y_outcomes: Tuple[Hashable, ...]
    rows: np.ndarray
    defined: np.ndarray

    def __getitem__(self, x: Hashable) -> DiscreteDist:
        try:
            i = self.x_outcomes.index(freeze_label(x))
        except ValueError as exc:
            raise ValidationException("Unknown x outcome", details={"x": x}) from exc
        return self.row(i)

    def row(self, i: int) -> DiscreteDist:
        if not self.defined[i]:
            raise UndefinedConditionalException(
                details={"x": thaw_label(self.x_outcomes[i])}
            )
        return DiscreteDist(self.y_outcomes, self.rows[i])

    def __iter__(self) -> Iterator[Tuple[Hashable, DiscreteDist]]:
        for i, x in enumerate(self.x_outcomes):
            if self.defined[i]:
                yield x, self.row(i)


@dataclass(frozen=True, eq=False)
class JointDiscrete:
    """
    Joint distribution P_{X,Y} on a finite product space.

    Attributes:
        x_outcomes: Row labels.
        y_outcomes: Column labels.
        probs: |X| x |Y| nonnegative matrix summing to 1 (read-only).
    """

    x_outcomes: Tuple[Hashable, ...]
    y_outcomes: Tuple[Hashable, ...]
    probs: np.ndarray

    def __post_init__(self):
        xs = tuple(freeze_label(o) for o in self.x_outcomes)
        ys = tuple(freeze_label(o) for o in self.y_outcomes)
        if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
            raise ValidationException("Joint labels must be distinct")
        mat = np.array(self.probs, dtype=float)
        if mat.shape != (len(xs), len(ys)):
            raise ValidationException(
                "Joint matrix shape does not match labels",
                details={"shape": list(mat.shape), "expected": [len(xs), len(ys)]},
            )
        flat = _validated_probs(mat.ravel())
        mat = flat.reshape(mat.shape).copy()
        mat.setflags(write=False)
        object.__setattr__(self, "x_outcomes", xs)
        object.__setattr__(self, "y_outcomes", ys)
        object.__setattr__(self, "probs", mat)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "JointDiscrete":
        """Build from ``{"x": [...], "y": [...], "probs": [[...]]}``."""
        try:
            return cls(tuple(data["x"]), tuple(data["y"]), data["probs"])
        except KeyError as exc:
            raise ValidationException(f"Missing key {exc.args[0]!r} in joint") from exc

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": [thaw_label(o) for o in self.x_outcomes],
            "y": [thaw_label(o) for o in self.y_outcomes],
            "probs": self.probs.tolist(),
        }

    @classmethod
    def product(cls, p_x: DiscreteDist, p_y: DiscreteDist) -> "JointDiscrete":
        return cls(p_x.outcomes, p_y.outcomes, np.outer(p_x.probs, p_y.probs))

    @classmethod
    def from_rows(cls, p_x: DiscreteDist, rows: np.ndarray, y_outcomes: Sequence[Hashable]) -> "JointDiscrete":
        """P_X(x) * P_{Y|X=x}(y) from a marginal and a row-stochastic matrix."""
        rows = np.asarray(rows, dtype=float)
        return cls(p_x.outcomes, tuple(y_outcomes), p_x.probs[:, None] * rows)

    @classmethod
    def from_flat(cls, dist: DiscreteDist, x_outcomes: Sequence[Hashable], y_outcomes: Sequence[Hashable]) -> "JointDiscrete":
        """Inverse of ``flatten``: outcomes must be the (x, y) pairs in row-major order."""
        xs = tuple(freeze_label(o) for o in x_outcomes)
        ys = tuple(freeze_label(o) for o in y_outcomes)
        expected = tuple((x, y) for x in xs for y in ys)
        if dist.outcomes != expected:
            raise ValidationException("Flat support is not the row-major product of the labels")
        return cls(xs, ys, dist.probs.reshape(len(xs), len(ys)))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.probs.shape

    def flatten(self) -> DiscreteDist:
        """DiscreteDist over (x, y) pairs, row-major."""
        pairs = tuple((x, y) for x in self.x_outcomes for y in self.y_outcomes)
        return DiscreteDist(pairs, self.probs.ravel())

    def marginal_x(self) -> DiscreteDist:
        return DiscreteDist(self.x_outcomes, self.probs.sum(axis=1))

    def marginal_y(self) -> DiscreteDist:
        return DiscreteDist(self.y_outcomes, self.probs.sum(axis=0))

    def conditionals(self) -> ConditionalFamily:
        mass = self.probs.sum(axis=1)
        defined = mass > 0
        rows = np.zeros_like(self.probs)
        rows[defined] = self.probs[defined] / mass[defined, None]
        defined.setflags(write=False)
        rows.setflags(write=False)
        return ConditionalFamily(self.x_outcomes, self.y_outcomes, rows, defined)

    def conditional(self, x: Hashable) -> DiscreteDist:
        return self.conditionals()[x]

    def marginals(self) -> Marginals:
        return Marginals(self.marginal_x(), self.marginal_y(), self.conditionals())

    def defined_rows(self) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.probs.sum(axis=1) > 0)]
