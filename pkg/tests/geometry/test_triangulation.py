"""Tests for two-view triangulation."""

from __future__ import annotations

import numpy as np
import pytest

from cone_tools.core.exceptions import ParallelRays
from cone_tools.geometry.models import CameraModel, Point2, Point3, RigidPose
from cone_tools.geometry.projection import project
from cone_tools.geometry.triangulation import triangulate_two_view

BASELINE = 0.5


@pytest.fixture
def left_to_right() -> RigidPose:
    # Right camera sits BASELINE meters to the right of the left one.
    return RigidPose.from_translation([-BASELINE, 0.0, 0.0])


def _views(camera: CameraModel, pose: RigidPose, point: Point3) -> tuple[Point2, Point2]:
    right = Point3.from_array(pose.apply(point.as_array()))
    return project(camera, point), project(camera, right)


class TestTriangulateTwoView:
    """Tests for triangulate_two_view."""

    def test_exact_projections(self, camera: CameraModel, left_to_right: RigidPose) -> None:
        """Verify exact projections recover the point."""
        point = Point3(x=0.2, y=0.1, z=6.0)
        uv_left, uv_right = _views(camera, left_to_right, point)
        found = triangulate_two_view(camera, camera, left_to_right, uv_left, uv_right)
        np.testing.assert_allclose(found.as_array(), point.as_array(), atol=1e-9)

    def test_rotated_rig(self, camera: CameraModel) -> None:
        """Verify a verged rig is handled through the full rotation."""
        pose = RigidPose.from_rotvec([0.0, -0.05, 0.0], [-BASELINE, 0.02, 0.01])
        point = Point3(x=-0.6, y=0.3, z=9.0)
        uv_left, uv_right = _views(camera, pose, point)
        found = triangulate_two_view(camera, camera, pose, uv_left, uv_right)
        np.testing.assert_allclose(found.as_array(), point.as_array(), atol=1e-9)

    def test_zero_disparity(self, camera: CameraModel, left_to_right: RigidPose) -> None:
        """Verify identical pixels in a translated rig give ParallelRays."""
        uv = Point2(x=850.0, y=420.0)
        with pytest.raises(ParallelRays):
            triangulate_two_view(camera, camera, left_to_right, uv, uv)

    def test_opposite_rays(self, camera: CameraModel) -> None:
        """Verify rays pointing in opposite directions give ParallelRays."""
        facing_back = RigidPose.from_rotvec([0.0, np.pi, 0.0], [-BASELINE, 0.0, 0.0])
        center = Point2(x=camera.cx, y=camera.cy)
        with pytest.raises(ParallelRays):
            triangulate_two_view(camera, camera, facing_back, center, center)

    def test_one_pixel_more_disparity(
        self, camera: CameraModel, left_to_right: RigidPose
    ) -> None:
        """Verify one extra pixel of disparity moves depth by about z^2 / (fx b)."""
        uv_left, uv_right = _views(camera, left_to_right, Point3(x=0.0, y=0.0, z=6.0))
        shifted = Point2(x=uv_right.x - 1.0, y=uv_right.y)
        found = triangulate_two_view(camera, camera, left_to_right, uv_left, shifted)
        assert 5.7 <= found.z <= 6.0
        assert 6.0 - found.z == pytest.approx(6.0**2 / (600.0 * BASELINE), rel=0.05)

    def test_one_pixel_less_disparity(
        self, camera: CameraModel, left_to_right: RigidPose
    ) -> None:
        """Verify shrinking disparity pushes the point further away."""
        uv_left, uv_right = _views(camera, left_to_right, Point3(x=0.0, y=0.0, z=6.0))
        shifted = Point2(x=uv_right.x + 1.0, y=uv_right.y)
        found = triangulate_two_view(camera, camera, left_to_right, uv_left, shifted)
        assert 6.0 < found.z <= 6.3
