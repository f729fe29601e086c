"""
Bound Reports
=============

Every evaluator returns ``BoundReport`` objects. A report either carries a
value it has earned (its preconditions were checked on the inputs) or is
marked not applicable with the failed condition in ``conditions``.

Directions:
- ``upper``: bounds H(P) - H(Q)
- ``lower``: bounds H(Q) - H(P) (the same theorem with P and Q exchanged)
- ``abs``:   bounds |H(P) - H(Q)|
- ``value``: an exact quantity reported for audit, not a bound
"""

import json
import logging
import math
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from entropy_bounds.core.exceptions import NotApplicableException, ValidationException

logger = logging.getLogger(__name__)

Direction = Literal["upper", "lower", "abs", "value"]


class BoundReport(BaseModel):
    """One evaluated bound."""

    model_config = ConfigDict(frozen=True)

    name: str
    value: Optional[float] = None
    applicable: bool
    conditions: List[str] = Field(default_factory=list)
    citation: str
    direction: Direction = "abs"
    extras: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_value_presence(self) -> "BoundReport":
        if self.applicable and self.value is None:
            raise ValueError("applicable report needs a value")
        if not self.applicable and self.value is not None:
            raise ValueError("non-applicable report cannot carry a value")
        if self.value is not None and math.isnan(self.value):
            raise ValueError("bound value is NaN")
        return self

    @classmethod
    def not_applicable(cls, name: str, reason: str, citation: str, direction: Direction = "abs") -> "BoundReport":
        return cls(name=name, applicable=False, conditions=[reason], citation=citation, direction=direction)

    def holds(self, signed_difference: float, tol: float = 1e-9) -> bool:
        """Check the report against H(P) - H(Q); non-applicable reports hold vacuously."""
        if not self.applicable or self.direction == "value":
            return True
        target = {
            "upper": signed_difference,
            "lower": -signed_difference,
            "abs": abs(signed_difference),
        }[self.direction]
        return target <= self.value + tol

    def to_json(self) -> str:
        # stdlib json keeps +inf as Infinity
        return json.dumps(self.model_dump(), allow_nan=True)

    @classmethod
    def from_json(cls, line: str) -> "BoundReport":
        return cls.model_validate(json.loads(line))


def absolute_report(pair: Sequence[BoundReport], name: Optional[str] = None) -> BoundReport:
    """Combine an (upper, lower) pair into a bound on |H(P) - H(Q)|."""
    upper, lower = pair
    name = name or upper.name.rsplit(".", 1)[0] + ".abs"
    if not (upper.applicable and lower.applicable):
        reasons = [c for r in pair if not r.applicable for c in r.conditions]
        return BoundReport.not_applicable(name, "; ".join(reasons) or "direction not applicable", upper.citation)
    return BoundReport(
        name=name,
        value=max(upper.value, lower.value),
        applicable=True,
        conditions=upper.conditions + lower.conditions,
        citation=upper.citation,
        direction="abs",
        extras={f"upper_{k}": v for k, v in upper.extras.items()} | {f"lower_{k}": v for k, v in lower.extras.items()},
    )


Computation = Callable[[], Tuple[float, List[str], Dict[str, float]]]
ReportPair = Tuple[BoundReport, BoundReport]


def guarded_report(name: str, direction: Direction, citation: str, compute: Computation) -> BoundReport:
    """
    Run ``compute`` and wrap its (value, conditions, extras) in a report.

    A failed precondition (``NotApplicableException`` or
    ``ValidationException``) becomes a non-applicable report.
    """
    try:
        value, conditions, extras = compute()
    except (NotApplicableException, ValidationException) as exc:
        logger.debug("%s not applicable: %s", name, exc.message)
        return BoundReport.not_applicable(name, exc.message, citation, direction)
    return BoundReport(
        name=name,
        value=float(value),
        applicable=True,
        conditions=conditions,
        citation=citation,
        direction=direction,
        extras={k: float(v) for k, v in extras.items()},
    )


def guarded_pair(prefix: str, citation: str, upper: Computation, lower: Computation) -> ReportPair:
    return (
        guarded_report(f"{prefix}.upper", "upper", citation, upper),
        guarded_report(f"{prefix}.lower", "lower", citation, lower),
    )
