"""Legendre duals and generalized inverses for CGF envelopes"""

from entropy_bounds.legendre.envelope import (
    CgfEnvelope,
    envelope_violation,
    exact_cgf,
    generalized_inverse,
    kl_bound_from_cgf,
    legendre_dual,
)

__all__ = [
    "CgfEnvelope",
    "envelope_violation",
    "exact_cgf",
    "generalized_inverse",
    "kl_bound_from_cgf",
    "legendre_dual",
]
