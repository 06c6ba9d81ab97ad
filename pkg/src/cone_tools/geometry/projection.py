"""Pinhole projection, back-projection and rigid transforms."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cone_tools.core.exceptions import NonPositiveDepth

from .models import CameraModel, Point2, Point3, RigidPose


def project_points(cam: CameraModel, points: ArrayLike) -> NDArray[np.float64]:
    """Project camera-frame points ``(N, 3)`` to pixels ``(N, 2)``.

    Results may lie outside the sensor; callers check bounds.

    Raises:
        NonPositiveDepth: If any point has ``z <= 0``.
    """
    array = np.atleast_2d(np.asarray(points, dtype=np.float64))
    z = array[:, 2]
    if np.any(z <= 0.0):
        raise NonPositiveDepth(f"cannot project point with z={float(np.min(z)):.6g}")
    u = cam.cx + cam.fx * array[:, 0] / z
    v = cam.cy + cam.fy * array[:, 1] / z
    return np.column_stack((u, v))


def project(cam: CameraModel, p: Point3) -> Point2:
    """Project a single camera-frame point."""
    return Point2.from_array(project_points(cam, p.as_array())[0])


def pixel_rays(cam: CameraModel, pixels: ArrayLike) -> NDArray[np.float64]:
    """Back-project pixels ``(N, 2)`` onto the ``z = 1`` plane."""
    array = np.atleast_2d(np.asarray(pixels, dtype=np.float64))
    x = (array[:, 0] - cam.cx) / cam.fx
    y = (array[:, 1] - cam.cy) / cam.fy
    return np.column_stack((x, y, np.ones(len(array))))


def backproject(cam: CameraModel, uv: Point2, depth: float) -> Point3:
    """Return the camera-frame point at ``depth`` along the ray through ``uv``."""
    if depth <= 0.0:
        raise NonPositiveDepth(f"cannot back-project to depth {depth:.6g}")
    return Point3.from_array(pixel_rays(cam, uv.as_array())[0] * depth)


def transform(pose: RigidPose, p: Point3) -> Point3:
    """Apply ``R @ p + t``."""
    return Point3.from_array(pose.apply(p.as_array()))


__all__ = ["project", "project_points", "pixel_rays", "backproject", "transform"]
