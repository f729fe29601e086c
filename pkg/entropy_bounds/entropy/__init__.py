"""Generalized entropy, optimal actions and Bayes decision rules"""

from entropy_bounds.entropy.generalized import (
    BayesRule,
    EntropyResult,
    argmax_tiebreak,
    argmin_tiebreak,
    conditional_entropy,
    expected_loss,
    generalized_entropy,
    rule_risk,
)

__all__ = [
    "BayesRule",
    "EntropyResult",
    "argmax_tiebreak",
    "argmin_tiebreak",
    "conditional_entropy",
    "expected_loss",
    "generalized_entropy",
    "rule_risk",
]
