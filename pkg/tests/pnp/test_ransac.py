"""Tests for exhaustive-subset consensus PnP."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from cone_tools.cone.keypoints import canonical_keypoint_array, cone_pose, keypoints_in_camera
from cone_tools.cone.models import LEFT_ARM, RIGHT_ARM, ConeGeometry, KeypointFrame, KeypointSet
from cone_tools.core.exceptions import ConeToolsError, NoConsensus
from cone_tools.geometry.models import CameraModel, RigidPose
from cone_tools.geometry.projection import project_points
from cone_tools.pnp.models import RansacConfig
from cone_tools.pnp.ransac import minimal_subsets, ransac_pnp
from cone_tools.pnp.solver import depth_init, refine_lm, robust_depth_init
from cone_tools.synthetic.scene import lateral_extent

TRUTH = [0.3, 0.0, 6.0]


def _solve(
    cam: CameraModel, g: ConeGeometry, image: np.ndarray, cfg: RansacConfig | None = None
):
    init = depth_init(cam, KeypointSet.from_array(image, KeypointFrame.IMAGE), g)
    return ransac_pnp(cam, canonical_keypoint_array(g), image, init, cfg)


class TestRansacConfig:
    """Tests for RansacConfig validation."""

    def test_defaults(self) -> None:
        """Verify default subset, threshold and minimum inliers."""
        cfg = RansacConfig()
        assert (cfg.subset_size, cfg.inlier_threshold, cfg.min_inliers) == (4, 2.0, 5)

    def test_min_inliers_below_subset(self) -> None:
        """Verify min_inliers below subset_size is rejected."""
        with pytest.raises(ValueError):
            RansacConfig(subset_size=5, min_inliers=4)


class TestRansacPnP:
    """Tests for ransac_pnp."""

    def test_clean_data_matches_plain_refinement(
        self, camera: CameraModel, cone: ConeGeometry
    ) -> None:
        """Verify zero noise keeps every point and agrees with refine_lm."""
        image = project_points(camera, keypoints_in_camera(cone, TRUTH))
        robust = _solve(camera, cone, image)
        init = depth_init(camera, KeypointSet.from_array(image), cone)
        plain = refine_lm(camera, canonical_keypoint_array(cone), image, init)
        assert robust.inlier_mask == (True,) * 7
        np.testing.assert_allclose(robust.pose.translation, plain.pose.translation, atol=1e-9)

    def test_single_outlier_excluded(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify a 30 px outlier is dropped and the position stays within 5 mm."""
        image = project_points(camera, keypoints_in_camera(cone, TRUTH))
        image[2, 0] += 30.0
        result = _solve(camera, cone, image)
        assert result.inlier_mask[2] is False
        assert result.inlier_count == 6
        np.testing.assert_allclose(result.pose.translation, TRUTH, atol=5e-3)

    def test_majority_corrupted(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify four displaced points leave no five-point consensus."""
        image = project_points(camera, keypoints_in_camera(cone, TRUTH))
        image[[1, 2, 4, 5], 0] += 30.0
        with pytest.raises(NoConsensus) as excinfo:
            _solve(camera, cone, image, RansacConfig(min_inliers=5))
        assert excinfo.value.inlier_count < 5

    def test_deterministic(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify two runs on the same data agree exactly."""
        rng = np.random.default_rng(5)
        image = project_points(camera, keypoints_in_camera(cone, TRUTH))
        image += rng.normal(0.0, 0.5, image.shape)
        first = _solve(camera, cone, image)
        second = _solve(camera, cone, image)
        np.testing.assert_array_equal(first.pose.translation, second.pose.translation)
        assert first.inlier_mask == second.inlier_mask

    def test_closure_over_random_cones(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify the consensus fit recovers 200 random in-view cones."""
        rng = np.random.default_rng(17)
        for _ in range(200):
            z = float(rng.uniform(4.0, 15.0))
            lo, hi = lateral_extent(camera, cone, z)
            truth = [float(rng.uniform(lo, hi)), 0.0, z]
            image = project_points(camera, keypoints_in_camera(cone, truth))
            result = _solve(camera, cone, image)
            np.testing.assert_allclose(result.pose.translation, truth, atol=1e-6)

    def test_offset_seed_logs_no_warnings(
        self, camera: CameraModel, cone: ConeGeometry, caplog: pytest.LogCaptureFixture
    ) -> None:
        """Verify a clean fit from a displaced seed never hits the iteration cap."""
        truth = [0.4, 0.0, 9.0]
        image = project_points(camera, keypoints_in_camera(cone, truth))
        seed = RigidPose(cone_pose(truth).rotation, np.add(truth, [0.05, -0.02, 0.3]))
        with caplog.at_level(logging.WARNING, logger="cone_tools"):
            result = ransac_pnp(camera, canonical_keypoint_array(cone), image, seed)
        assert [r for r in caplog.records if r.levelno >= logging.WARNING] == []
        np.testing.assert_allclose(result.pose.translation, truth, atol=1e-6)


class TestMinimalSubsets:
    """Tests for minimal_subsets."""

    def test_skips_single_arms(self, cone: ConeGeometry) -> None:
        """Verify the two collinear arm subsets are left out of the 35."""
        subsets = list(minimal_subsets(canonical_keypoint_array(cone), 4))
        assert len(subsets) == 33
        assert LEFT_ARM not in subsets
        assert RIGHT_ARM not in subsets
        assert subsets == sorted(subsets)

    def test_larger_subsets_all_kept(self, cone: ConeGeometry) -> None:
        """Verify five-point subsets always span the cone plane."""
        assert len(list(minimal_subsets(canonical_keypoint_array(cone), 5))) == 21

    def test_all_collinear(self) -> None:
        """Verify points on one line yield nothing."""
        line = np.outer(np.arange(5.0), [1.0, 2.0, 0.0])
        assert list(minimal_subsets(line, 4)) == []


class TestOutlierRejection:
    """Monte Carlo check of single-outlier rejection on the consensus path."""

    @pytest.mark.slow
    def test_single_outlier_rejected(
        self, require_slow: None, camera: CameraModel, cone: ConeGeometry
    ) -> None:
        """Verify one 30 px outlier is excluded within 5 mm in at least 99% of 500 cones."""
        rng = np.random.default_rng(99)
        model = canonical_keypoint_array(cone)
        failures = []
        for trial in range(500):
            truth = np.array([rng.uniform(-1.0, 1.0), 0.0, rng.uniform(4.0, 15.0)])
            image = project_points(camera, keypoints_in_camera(cone, truth))
            index = int(rng.integers(7))
            angle = rng.uniform(0.0, 2.0 * np.pi)
            image[index] += 30.0 * np.array([np.cos(angle), np.sin(angle)])
            keypoints = KeypointSet.from_array(image, KeypointFrame.IMAGE)
            try:
                init = robust_depth_init(camera, keypoints, cone)
                result = ransac_pnp(camera, model, image, init)
            except ConeToolsError as exc:
                failures.append((trial, index, type(exc).__name__))
                continue
            error = float(np.linalg.norm(result.pose.translation - truth))
            if result.inlier_mask[index] or error > 5e-3:
                failures.append((trial, index, f"error {error:.4f} m"))
        assert len(failures) <= 5, failures
