"""Least-squares quadratic fit used by the depth-accuracy experiment."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from cone_tools.core.exceptions import InsufficientPoints, SingularSystem, ValidationError


def fit_quadratic(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Fit ``y = a x^2 + b x + c`` minimizing the sum of squared residuals.

    Returns:
        Coefficients ``(a, b, c)``.

    Raises:
        InsufficientPoints: Fewer than three samples.
        SingularSystem: Fewer than three distinct abscissae.
    """
    x = np.asarray(xs, dtype=np.float64).ravel()
    y = np.asarray(ys, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValidationError(f"xs and ys differ in length ({x.size} vs {y.size})")
    if x.size < 3:
        raise InsufficientPoints(f"need at least 3 points, got {x.size}")
    if np.unique(x).size < 3:
        raise SingularSystem("need at least 3 distinct x values")

    design = np.column_stack((x * x, x, np.ones_like(x)))
    coeffs, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise SingularSystem(f"design matrix rank {rank} < 3")
    a, b, c = (float(v) for v in coeffs)
    return a, b, c


def eval_quadratic(coeffs: tuple[float, float, float], x: float | np.ndarray) -> np.ndarray:
    a, b, c = coeffs
    x = np.asarray(x, dtype=np.float64)
    return a * x * x + b * x + c


__all__ = ["fit_quadratic", "eval_quadratic"]
