"""Statistical distances: f-divergences, Renyi, Wasserstein and loss-based distances"""

from entropy_bounds.divergence.f_divergences import (
    chi2,
    kl,
    renyi_cross,
    renyi_entropy,
    tv,
)
from entropy_bounds.divergence.loss_distances import (
    pushforward,
    pushforward_pair,
    semidistance_al,
)
from entropy_bounds.divergence.transport import (
    TransportPlan,
    wasserstein1_1d,
    wasserstein1_discrete,
    wasserstein2_1d,
)

__all__ = [
    "TransportPlan",
    "chi2",
    "kl",
    "pushforward",
    "pushforward_pair",
    "renyi_cross",
    "renyi_entropy",
    "semidistance_al",
    "tv",
    "wasserstein1_1d",
    "wasserstein1_discrete",
    "wasserstein2_1d",
]
