"""
Metrics on Finite Outcome Spaces
================================

Distance matrices feed the transport LP, the Lipschitz checks and the
``metric`` loss kind. Every matrix passes ``validate_metric`` before use.
"""

import numpy as np
from scipy.spatial.distance import cdist

from entropy_bounds.core.config import settings
from entropy_bounds.core.exceptions import ValidationException


def validate_metric(d, check_triangle_max: int | None = None) -> np.ndarray:
    """
    Check the metric axioms and return a read-only float matrix.

    Symmetry, zero diagonal, positive off-diagonal entries always; the
    triangle inequality exhaustively when |Z| <= ``check_triangle_max``.

    Raises:
        ValidationException: on the first violated axiom.
    """
    d = np.array(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValidationException("Metric must be a square matrix", details={"shape": list(d.shape)})
    if not np.all(np.isfinite(d)):
        raise ValidationException("Metric entries must be finite")
    if not np.allclose(d, d.T, rtol=0.0, atol=1e-12):
        raise ValidationException("Metric must be symmetric")
    if np.any(np.abs(np.diag(d)) > 1e-12):
        raise ValidationException("Metric diagonal must be zero")
    off = ~np.eye(d.shape[0], dtype=bool)
    if np.any(d[off] <= 0):
        raise ValidationException("Metric must separate distinct outcomes")

    limit = settings.METRIC_CHECK_MAX_SUPPORT if check_triangle_max is None else check_triangle_max
    if d.shape[0] <= limit:
        # d[i, k] <= d[i, j] + d[j, k] for all (i, j, k)
        slack = d[:, :, None] + d[None, :, :] - d[:, None, :]
        if np.any(slack < -1e-12):
            i, j, k = np.unravel_index(int(np.argmin(slack)), slack.shape)
            raise ValidationException(
                "Metric violates the triangle inequality",
                details={"i": int(i), "j": int(j), "k": int(k)},
            )
    np.fill_diagonal(d, 0.0)
    d.setflags(write=False)
    return d


def zero_one_metric(k: int) -> np.ndarray:
    return validate_metric(1.0 - np.eye(k))


def line_metric(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return validate_metric(np.abs(v[:, None] - v[None, :]))


def euclidean_metric(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return validate_metric(cdist(pts, pts))


def default_metric(dist, spec=None) -> np.ndarray:
    """
    Natural metric for a distribution's outcomes.

    Zero-one loss gets the zero-one metric, metric losses their own matrix,
    numeric outcomes the Euclidean distance; anything else is rejected.
    """
    if spec is not None and spec.kind == "zero-one":
        return zero_one_metric(len(dist))
    if spec is not None and spec.kind == "metric":
        return spec.table
    try:
        return euclidean_metric(dist.points())
    except ValidationException as exc:
        raise ValidationException("No metric supplied and outcomes are not numeric") from exc
