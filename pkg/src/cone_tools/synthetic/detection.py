"""Simulated detector boxes and the edge-perturbation noise model."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from cone_tools.cone.keypoints import keypoints_in_camera
from cone_tools.cone.models import ConeGeometry
from cone_tools.core.exceptions import (
    CollapsedBox,
    NonPositiveDepth,
    OutOfFrame,
    ValidationError,
)
from cone_tools.core.resilience import resample
from cone_tools.geometry.models import CameraModel, Point3
from cone_tools.geometry.projection import project_points

from .models import BBox

DEFAULT_MARGIN_FRAC = 0.15
MAX_PERTURBATION = 0.5
MAX_RESAMPLES = 10


def dilate(points: ArrayLike, margin_frac: float) -> BBox:
    """Tight box around ``(N, 2)`` points, grown by ``margin_frac`` per side."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    left, top = pts.min(axis=0)
    right, bottom = pts.max(axis=0)
    dx = margin_frac * (right - left)
    dy = margin_frac * (bottom - top)
    return BBox.from_edges(left - dx, top - dy, right + dx, bottom + dy)


def simulate_detection(
    cam: CameraModel,
    cone_position: Point3,
    g: ConeGeometry,
    margin_frac: float = DEFAULT_MARGIN_FRAC,
) -> BBox:
    """Detector stand-in: box around the projected keypoints plus a margin.

    The box may reach past the image borders for partially visible cones.

    Raises:
        OutOfFrame: If the cone is behind the camera or misses the image.
    """
    if margin_frac < 0:
        raise ValidationError(f"margin_frac must be >= 0, got {margin_frac}")
    try:
        image_pts = project_points(cam, keypoints_in_camera(g, cone_position.as_array()))
    except NonPositiveDepth as exc:
        raise OutOfFrame(f"cone at z={cone_position.z:.3f} is behind the camera") from exc
    bbox = dilate(image_pts, margin_frac)
    if not dilate(image_pts, 0.0).intersects(cam.width, cam.height):
        where = f"x={cone_position.x:.3f}, z={cone_position.z:.3f}"
        raise OutOfFrame(f"cone at {where} misses the image")
    return bbox


def perturb_bbox(b: BBox, pct: float, seed: int | np.random.Generator) -> BBox:
    """Shift each edge independently by ``U(-pct, pct)`` of the box size.

    Top and bottom edges move by fractions of ``h``; left and right edges by
    fractions of ``w``. A draw that collapses the box is redrawn, up to 10
    attempts.

    Raises:
        ValidationError: If ``pct`` is outside ``[0, 0.5]``.
        CollapsedBox: If every attempt collapsed the box.
    """
    if not 0.0 <= pct <= MAX_PERTURBATION:
        raise ValidationError(f"pct must be within [0, {MAX_PERTURBATION}], got {pct}")
    if pct == 0.0:
        return b
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    def draw() -> BBox:
        d_left, d_right, d_top, d_bottom = rng.uniform(-pct, pct, size=4)
        left = b.x + d_left * b.w
        right = b.right + d_right * b.w
        top = b.y + d_top * b.h
        bottom = b.bottom + d_bottom * b.h
        if right <= left or bottom <= top:
            raise CollapsedBox(f"perturbation collapsed box {b}")
        return BBox.from_edges(left, top, right, bottom)

    return resample(draw, CollapsedBox, max_attempts=MAX_RESAMPLES)


__all__ = ["DEFAULT_MARGIN_FRAC", "dilate", "simulate_detection", "perturb_bbox"]
