"""Two-view triangulation by the midpoint of the common perpendicular."""

from __future__ import annotations

import numpy as np

from cone_tools.core.exceptions import ParallelRays

from .models import CameraModel, Point2, Point3, RigidPose
from .projection import pixel_rays

MIN_RAY_ANGLE = 1e-8


def triangulate_two_view(
    cam_left: CameraModel,
    cam_right: CameraModel,
    left_to_right: RigidPose,
    uv_left: Point2,
    uv_right: Point2,
) -> Point3:
    """Intersect the rays through ``uv_left`` and ``uv_right``.

    ``left_to_right`` maps left-camera coordinates into the right camera.
    The result is the midpoint of the shortest segment joining both rays,
    expressed in the left camera frame.

    Raises:
        ParallelRays: If the rays are closer than ``MIN_RAY_ANGLE`` radians.
    """
    origin_l = np.zeros(3)
    dir_l = pixel_rays(cam_left, uv_left.as_array())[0]

    rotation_t = left_to_right.rotation.T
    origin_r = -rotation_t @ left_to_right.translation
    dir_r = rotation_t @ pixel_rays(cam_right, uv_right.as_array())[0]

    angle = np.arctan2(np.linalg.norm(np.cross(dir_l, dir_r)), float(dir_l @ dir_r))
    # Lines, not half-lines: anti-parallel rays are parallel too.
    angle = min(angle, np.pi - angle)
    if angle < MIN_RAY_ANGLE:
        raise ParallelRays(f"rays are parallel (angle {angle:.3e} rad)")

    w0 = origin_l - origin_r
    a = float(dir_l @ dir_l)
    b = float(dir_l @ dir_r)
    c = float(dir_r @ dir_r)
    d = float(dir_l @ w0)
    e = float(dir_r @ w0)
    denom = a * c - b * b
    s = (b * e - c * d) / denom
    t = (a * e - b * d) / denom

    closest_l = origin_l + s * dir_l
    closest_r = origin_r + t * dir_r
    return Point3.from_array(0.5 * (closest_l + closest_r))


__all__ = ["MIN_RAY_ANGLE", "triangulate_two_view"]
