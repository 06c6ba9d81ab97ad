"""Canonical 3D keypoints of the cone and its model-side cross-ratio.

The cone frame sits at the base center with y up along the cone axis. All
seven keypoints lie in the ``z = 0`` plane: the silhouette that faces the
camera. Because the cone is rotationally symmetric that silhouette is the
same from every direction, which is what lets the pipeline discard the
estimated orientation.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

from cone_tools.geometry.cross_ratio import cross_ratio
from cone_tools.geometry.models import Point3, RigidPose

from .models import LEFT_ARM, ConeGeometry

# Cone frame -> camera frame rotation for an upright cone facing the camera:
# cone y (up) maps to camera -y, cone z to camera -z.
CAMERA_FACING = np.diag([1.0, -1.0, -1.0])


def canonical_keypoint_array(g: ConeGeometry) -> NDArray[np.float64]:
    """Return the seven keypoints as a ``(7, 3)`` array in KeypointSet order."""
    apex = np.array([0.0, g.height, 0.0])
    left_base = np.array([-g.base_halfwidth, 0.0, 0.0])
    right_base = np.array([g.base_halfwidth, 0.0, 0.0])
    params = (g.t2, g.t3)
    left = [apex + t * (left_base - apex) for t in params]
    right = [apex + t * (right_base - apex) for t in params]
    return np.vstack([apex, *left, left_base, *right, right_base])


def canonical_keypoints(g: ConeGeometry) -> list[Point3]:
    return [Point3.from_array(row) for row in canonical_keypoint_array(g)]


def model_cross_ratio(g: ConeGeometry) -> float:
    """Cross-ratio of the left arm (apex, t2, t3, base) measured in 3D.

    Analytically ``t3 (1 - t2) / (t3 - t2)``; the right arm is identical by
    symmetry.
    """
    points = canonical_keypoint_array(g)
    a, b, c, d = (points[i] for i in LEFT_ARM)
    return cross_ratio(a, b, c, d, dim=3)


def cone_pose(position: ArrayLike, yaw: float = 0.0) -> RigidPose:
    """Cone-frame -> camera-frame pose of an upright cone with base at ``position``.

    ``yaw`` spins the cone about its own axis, which leaves the physical
    cone unchanged.
    """
    spin = Rotation.from_rotvec([0.0, yaw, 0.0]).as_matrix()
    return RigidPose(CAMERA_FACING @ spin, np.asarray(position, dtype=np.float64))


def keypoints_in_camera(g: ConeGeometry, position: ArrayLike) -> NDArray[np.float64]:
    """Camera-frame ``(7, 3)`` keypoints of an upright cone at ``position``."""
    return cone_pose(position).apply(canonical_keypoint_array(g))


__all__ = [
    "CAMERA_FACING",
    "canonical_keypoint_array",
    "canonical_keypoints",
    "model_cross_ratio",
    "cone_pose",
    "keypoints_in_camera",
]
