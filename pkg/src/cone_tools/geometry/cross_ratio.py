"""Cross-ratio of four collinear points.

The cross-ratio is preserved by any projective map, so the value measured
on the 3D cone equals the value measured on its image.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from numpy.typing import ArrayLike

from cone_tools.core.exceptions import DegenerateConfiguration, ValidationError

from .models import Point2, Point3

# Squared-distance floor below which a configuration counts as corrupt.
DEGENERACY_EPSILON = 1e-12

PointLike = Point2 | Point3 | ArrayLike


def _coords(point: PointLike, dim: int) -> np.ndarray:
    array = point.as_array() if isinstance(point, Point2 | Point3) else np.asarray(point, float)
    if array.shape != (dim,):
        raise ValidationError(f"expected a {dim}D point, received shape {array.shape}")
    return array


def cross_ratio(
    p1: PointLike,
    p2: PointLike,
    p3: PointLike,
    p4: PointLike,
    dim: Literal[2, 3] = 2,
) -> float:
    """Return ``(Δ13 / Δ14) / (Δ23 / Δ24)`` with Euclidean distances.

    Raises:
        DegenerateConfiguration: If Δ14, Δ23 or Δ24 vanishes.
    """
    if dim not in (2, 3):
        raise ValidationError(f"dim must be 2 or 3, got {dim}")
    a, b, c, d = (_coords(p, dim) for p in (p1, p2, p3, p4))

    def sq(u: np.ndarray, v: np.ndarray) -> float:
        delta = u - v
        return float(delta @ delta)

    d13, d14, d23, d24 = sq(a, c), sq(a, d), sq(b, c), sq(b, d)
    for name, value in (("Δ14", d14), ("Δ23", d23), ("Δ24", d24)):
        if value < DEGENERACY_EPSILON:
            raise DegenerateConfiguration(f"{name} vanishes (squared distance {value:.3e})")
    return float(np.sqrt(d13 * d24 / (d14 * d23)))


__all__ = ["DEGENERACY_EPSILON", "cross_ratio"]
