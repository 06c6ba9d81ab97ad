"""Tests for the procedural patch rasterizer."""

from __future__ import annotations

import numpy as np
import pytest

from cone_tools.cone.keypoints import model_cross_ratio
from cone_tools.cone.models import LEFT_ARM, RIGHT_ARM, ColorClass, ConeGeometry, KeypointFrame
from cone_tools.core.exceptions import OutOfFrame, TooSmall
from cone_tools.geometry.cross_ratio import cross_ratio
from cone_tools.geometry.models import CameraModel, Point3
from cone_tools.synthetic.detection import simulate_detection
from cone_tools.synthetic.models import NoiseConfig
from cone_tools.synthetic.render import (
    BAND_COLORS,
    Augmentation,
    cone_bands,
    jitter_colors,
    project_cone,
    render_patch,
)
from cone_tools.synthetic.scene import lateral_extent

CENTER = Point3(x=0.0, y=0.0, z=6.0)


def _is_stripe(rgb: np.ndarray, color: ColorClass) -> np.ndarray:
    outer, stripe = (np.asarray(c) for c in BAND_COLORS[color])
    return np.linalg.norm(rgb - stripe, axis=-1) < np.linalg.norm(rgb - outer, axis=-1)


class TestProjectCone:
    """Tests for project_cone."""

    def test_too_small(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify a cone at 30 m is below the 8 px threshold."""
        with pytest.raises(TooSmall):
            project_cone(camera, Point3(x=0, y=0, z=30), cone, 8.0)

    def test_behind_camera(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify a cone behind the camera is out of frame."""
        with pytest.raises(OutOfFrame):
            project_cone(camera, Point3(x=0, y=0, z=-6), cone, 8.0)

    def test_apparent_height(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify the apex sits fy * h / z above the base."""
        kps = project_cone(camera, CENTER, cone, 8.0)
        assert kps[3, 1] - kps[0, 1] == pytest.approx(600.0 * 0.325 / 6.0)


class TestRenderPatch:
    """Tests for render_patch."""

    def test_patch_shape_and_range(
        self, camera: CameraModel, cone: ConeGeometry
    ) -> None:
        """Verify an 80 x 80 x 3 float32 patch with values in [0, 1]."""
        sample = render_patch(camera, CENTER, cone, 0)
        assert sample.patch.shape == (80, 80, 3)
        assert sample.patch.dtype == np.float32
        assert float(sample.patch.min()) >= 0.0
        assert float(sample.patch.max()) <= 1.0
        assert sample.keypoints.frame is KeypointFrame.PATCH

    def test_keypoint_ordering(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify apex above stripes above base in patch y."""
        kps = render_patch(camera, CENTER, cone, 0).keypoints.as_array()
        assert kps[0, 1] < kps[1, 1] < kps[2, 1] < kps[3, 1]
        assert kps[0, 1] < kps[4, 1] < kps[5, 1] < kps[6, 1]
        assert kps[3, 0] < kps[0, 0] < kps[6, 0]

    def test_cross_ratio_preserved(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify annotated arms keep the model cross-ratio."""
        kps = render_patch(camera, Point3(x=-1.1, y=0.0, z=9.0), cone, 3).keypoints.as_array()
        expected = model_cross_ratio(cone)
        for arm in (LEFT_ARM, RIGHT_ARM):
            assert cross_ratio(*(kps[i] for i in arm)) == pytest.approx(expected, abs=1e-9)

    def test_cross_ratio_preserved_under_augmentation(
        self, camera: CameraModel, cone: ConeGeometry
    ) -> None:
        """Verify the similarity augmentation keeps the cross-ratio."""
        sample = render_patch(camera, CENTER, cone, 5, augment=True)
        kps = sample.keypoints.as_array()
        value = cross_ratio(*(kps[i] for i in LEFT_ARM))
        assert value == pytest.approx(model_cross_ratio(cone), abs=1e-9)

    def test_image_keypoints_match_projection(
        self, camera: CameraModel, cone: ConeGeometry
    ) -> None:
        """Verify patch annotations map back onto the exact projections."""
        position = Point3(x=0.8, y=0.0, z=11.0)
        sample = render_patch(camera, position, cone, 1)
        exact = project_cone(camera, position, cone, 8.0)
        np.testing.assert_allclose(sample.image_keypoints().as_array(), exact, atol=1e-9)

    def test_photometric_seed_reproducible(
        self, camera: CameraModel, cone: ConeGeometry
    ) -> None:
        """Verify the same seed renders the same patch and another seed does not."""
        first = render_patch(camera, CENTER, cone, 7, augment=True)
        second = render_patch(camera, CENTER, cone, 7, augment=True)
        third = render_patch(camera, CENTER, cone, 8, augment=True)
        assert first == second
        assert first != third

    def test_stripe_boundaries_follow_keypoints(
        self, camera: CameraModel, cone: ConeGeometry, clean_noise: NoiseConfig
    ) -> None:
        """Verify rendered band edges lie within 1 px of the stripe keypoints."""
        rng = np.random.default_rng(99)
        for seed in range(100):
            z = float(rng.uniform(4.0, 15.0))
            lo, hi = lateral_extent(camera, cone, z)
            position = Point3(x=float(rng.uniform(lo, hi)), y=0.0, z=z)
            sample = render_patch(camera, position, cone, seed, noise=clean_noise)
            kps = sample.keypoints.as_array()
            column = int(np.floor(kps[0, 0]))
            rows = np.arange(int(np.ceil(kps[0, 1])) + 2, int(np.floor(kps[3, 1])) - 1)
            stripe_rows = rows[_is_stripe(sample.patch[rows, column], cone.color_class)]
            assert stripe_rows.size > 0
            assert abs(stripe_rows[0] - kps[1, 1]) <= 1.0
            assert abs(stripe_rows[-1] + 1 - kps[2, 1]) <= 1.0

    @pytest.mark.parametrize("color", list(ColorClass))
    def test_band_colors(
        self,
        camera: CameraModel,
        cone: ConeGeometry,
        clean_noise: NoiseConfig,
        color: ColorClass,
    ) -> None:
        """Verify each class paints its outer and stripe colors."""
        sample = render_patch(camera, CENTER, cone.with_color(color), 0, noise=clean_noise)
        kps = sample.keypoints.as_array()
        outer, stripe = BAND_COLORS[color]
        column = int(np.floor(kps[0, 0]))
        mid_stripe = int(0.5 * (kps[1, 1] + kps[2, 1]))
        bottom_band = int(0.5 * (kps[2, 1] + kps[3, 1]))
        np.testing.assert_allclose(sample.patch[mid_stripe, column], stripe, atol=1e-6)
        np.testing.assert_allclose(sample.patch[bottom_band, column], outer, atol=1e-6)
        assert sample.color_class is color

    def test_off_sensor_pixels_black(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify crop pixels beyond the image border are zero."""
        _, hi = lateral_extent(camera, cone, 6.0, fov_margin=0.0)
        position = Point3(x=hi + 0.1, y=0.0, z=6.0)
        sample = render_patch(camera, position, cone, 0)
        assert sample.bbox.is_truncated(camera.width, camera.height)
        assert np.all(sample.patch[:, -1] == 0.0)

    def test_explicit_bbox_is_used(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify a supplied box defines the crop."""
        box = simulate_detection(camera, CENTER, cone, 0.4)
        sample = render_patch(camera, CENTER, cone, 0, bbox=box)
        assert sample.bbox == box

    def test_too_small(self, camera: CameraModel, cone: ConeGeometry) -> None:
        """Verify rendering a distant cone raises TooSmall."""
        with pytest.raises(TooSmall):
            render_patch(camera, Point3(x=0, y=0, z=30), cone, 0)


class TestConeBands:
    """Tests for cone_bands."""

    KPS = np.array(
        [
            [40.0, 10.0],
            [36.0, 30.0],
            [32.0, 50.0],
            [28.0, 70.0],
            [44.0, 30.0],
            [48.0, 50.0],
            [52.0, 70.0],
        ]
    )

    def test_labels(self) -> None:
        """Verify outside, top band, stripe and bottom band labels."""
        points = np.array([[5.0, 5.0], [40.0, 20.0], [40.0, 40.0], [40.0, 60.0]])
        np.testing.assert_array_equal(cone_bands(points, self.KPS), [-1, 0, 1, 2])

    def test_below_base_is_outside(self) -> None:
        """Verify points under the base line are outside."""
        assert cone_bands(np.array([[40.0, 75.0]]), self.KPS)[0] == -1


class TestPhotometrics:
    """Tests for augmentation and color jitter."""

    def test_augmentation_inverts(self) -> None:
        """Verify invert undoes apply."""
        aug = Augmentation.draw(np.random.default_rng(0))
        points = np.array([[3.0, 4.0], [70.0, 12.0]])
        np.testing.assert_allclose(aug.invert(aug.apply(points, 40.0), 40.0), points)

    def test_augmentation_bounds(self) -> None:
        """Verify drawn parameters stay in their ranges."""
        rng = np.random.default_rng(1)
        for _ in range(200):
            aug = Augmentation.draw(rng)
            assert abs(aug.angle) <= np.deg2rad(10.0)
            assert 0.9 <= aug.scale <= 1.1
            assert all(abs(s) <= 4.0 for s in aug.shift)

    def test_zero_jitter_is_identity(self) -> None:
        """Verify zero jitter returns the input and still consumes three draws."""
        rgb = np.random.default_rng(2).uniform(size=(8, 8, 3))
        rng = np.random.default_rng(3)
        out = jitter_colors(rgb, rng, 0.0, 0.0, 0.0)
        np.testing.assert_allclose(out, rgb, atol=1e-12)
        reference = np.random.default_rng(3)
        reference.uniform(size=3)
        assert rng.uniform() == reference.uniform()

    def test_jitter_stays_in_range(self) -> None:
        """Verify jittered values are clipped to [0, 1]."""
        rgb = np.random.default_rng(4).uniform(size=(4, 8, 8, 3))
        out = jitter_colors(rgb, np.random.default_rng(5), 0.5, 0.5, 0.5)
        assert out.min() >= 0.0
        assert out.max() <= 1.0
