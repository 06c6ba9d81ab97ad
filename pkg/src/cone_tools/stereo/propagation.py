"""Left-to-right box propagation and keypoint triangulation for a stereo pair.

The mono estimate predicts where the cone lands in the right image, so the
right-frame search is a single propagated box. The seven regressed
keypoints of both views are index-matched correspondences.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray

from cone_tools.cone.keypoints import CAMERA_FACING, canonical_keypoint_array, keypoints_in_camera
from cone_tools.cone.models import ConeGeometry, KeypointFrame, KeypointSet
from cone_tools.core.exceptions import (
    BehindRightCamera,
    InsufficientPairs,
    OutOfRightFrame,
    ParallelRays,
    ValidationError,
)
from cone_tools.geometry.models import Point3
from cone_tools.geometry.projection import project_points
from cone_tools.geometry.triangulation import triangulate_two_view
from cone_tools.synthetic.detection import dilate
from cone_tools.synthetic.models import BBox

from .models import StereoRig

logger = logging.getLogger(__name__)

MIN_PAIRS = 3


def propagate_bbox(
    rig: StereoRig, mono_position: Point3, bbox_left: BBox, g: ConeGeometry
) -> BBox:
    """Project the mono cone estimate into the right image and box it.

    The right box gets the same per-side margin fraction that ``bbox_left``
    has around the cone's left projection.

    Raises:
        ValidationError: If ``mono_position`` is not in front of the left camera.
        BehindRightCamera: If any keypoint has ``z <= 0`` in the right frame.
        OutOfRightFrame: If the propagated box misses the right image.
    """
    if mono_position.z <= 0.0:
        raise ValidationError(f"mono position has z={mono_position.z}")
    left_points = keypoints_in_camera(g, mono_position.as_array())
    tight_left = dilate(project_points(rig.left, left_points), 0.0)
    margin = max(0.5 * (bbox_left.w / tight_left.w - 1.0), 0.0)

    right_points = rig.left_to_right.apply(left_points)
    if np.any(right_points[:, 2] <= 0.0):
        raise BehindRightCamera(f"cone at {mono_position} is behind the right camera")
    bbox = dilate(project_points(rig.right, right_points), margin)
    if not bbox.intersects(rig.right.width, rig.right.height):
        raise OutOfRightFrame(f"propagated box {bbox} misses the right image")
    return bbox


def base_estimates(
    rig: StereoRig, kps_left: KeypointSet, kps_right: KeypointSet, g: ConeGeometry
) -> NDArray[np.float64]:
    """Per-pair base-center estimates ``(M, 3)`` in the left frame.

    Each keypoint pair is triangulated and shifted by that keypoint's
    offset from the base center of an upright cone. Pairs with parallel
    rays are dropped.
    """
    for kps in (kps_left, kps_right):
        if kps.frame is not KeypointFrame.IMAGE:
            raise ValidationError("stereo keypoints must be in the image frame")
    offsets = canonical_keypoint_array(g) @ CAMERA_FACING.T
    estimates = []
    pairs = zip(kps_left.points, kps_right.points, strict=True)
    for index, (uv_left, uv_right) in enumerate(pairs):
        try:
            point = triangulate_two_view(rig.left, rig.right, rig.left_to_right, uv_left, uv_right)
        except ParallelRays as exc:
            logger.debug("dropping keypoint pair %d: %s", index, exc)
            continue
        estimates.append(point.as_array() - offsets[index])
    return np.array(estimates).reshape(-1, 3)


def stereo_refine(
    rig: StereoRig,
    kps_left: KeypointSet,
    kps_right: KeypointSet,
    g: ConeGeometry | None = None,
) -> Point3:
    """Cone base position (left frame) as the componentwise median of pair estimates.

    Raises:
        InsufficientPairs: If fewer than 3 pairs triangulate.
    """
    estimates = base_estimates(rig, kps_left, kps_right, g or ConeGeometry())
    if len(estimates) < MIN_PAIRS:
        raise InsufficientPairs(f"only {len(estimates)} keypoint pairs triangulated")
    return Point3.from_array(np.median(estimates, axis=0))


__all__ = ["MIN_PAIRS", "propagate_bbox", "base_estimates", "stereo_refine"]
