"""Tests for the cross-ratio invariant."""

from __future__ import annotations

import numpy as np
import pytest

from cone_tools.core.exceptions import DegenerateConfiguration, ValidationError
from cone_tools.geometry.cross_ratio import cross_ratio
from cone_tools.geometry.models import CameraModel, Point2, Point3
from cone_tools.geometry.projection import project_points


class TestCrossRatio:
    """Tests for cross_ratio."""

    def test_evenly_spaced_points(self) -> None:
        """Verify points at 0, 1, 2, 3 give 4/3."""
        points = [Point2(x=float(i), y=0.0) for i in range(4)]
        assert cross_ratio(*points) == pytest.approx(4.0 / 3.0, abs=1e-15)

    def test_accepts_arrays(self) -> None:
        """Verify plain arrays are accepted alongside points."""
        value = cross_ratio([0.0, 0.0], [1.0, 0.0], [2.0, 0.0], np.array([3.0, 0.0]))
        assert value == pytest.approx(4.0 / 3.0)

    def test_three_dimensional(self) -> None:
        """Verify dim=3 measures along a 3D line."""
        direction = np.array([1.0, 2.0, 2.0]) / 3.0
        points = [Point3.from_array(t * direction) for t in (0.0, 1.0, 2.0, 3.0)]
        assert cross_ratio(*points, dim=3) == pytest.approx(4.0 / 3.0)

    def test_coincident_points(self) -> None:
        """Verify coincident p2 and p3 raise DegenerateConfiguration."""
        p = [Point2(x=0, y=0), Point2(x=1, y=0), Point2(x=1, y=0), Point2(x=3, y=0)]
        with pytest.raises(DegenerateConfiguration):
            cross_ratio(*p)

    def test_dimension_mismatch(self) -> None:
        """Verify a 3D point is rejected in 2D mode."""
        with pytest.raises(ValidationError):
            cross_ratio([0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0])

    def test_bad_dim(self) -> None:
        """Verify dim other than 2 or 3 is rejected."""
        with pytest.raises(ValidationError):
            cross_ratio([0], [1], [2], [3], dim=1)  # type: ignore[arg-type]

    def test_projective_invariance(self, camera: CameraModel) -> None:
        """Verify the value survives perspective projection of a slanted line."""
        start = np.array([-0.4, 0.3, 5.0])
        direction = np.array([0.3, -0.5, 2.5])
        points3 = np.array([start + t * direction for t in (0.0, 0.7, 1.1, 2.0)])
        pixels = project_points(camera, points3)
        assert cross_ratio(*pixels) == pytest.approx(cross_ratio(*points3, dim=3), rel=1e-9)

    def test_invariance_over_random_projections(self, camera: CameraModel) -> None:
        """Verify 1000 random lines keep their cross-ratio through the pinhole."""
        rng = np.random.default_rng(31)
        for _ in range(1000):
            start = np.array(
                [rng.uniform(-2.0, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(4.0, 12.0)]
            )
            lateral = rng.uniform(-1.0, 1.0, 2)
            while np.linalg.norm(lateral) < 0.3:
                lateral = rng.uniform(-1.0, 1.0, 2)
            direction = np.array([lateral[0], lateral[1], rng.uniform(-1.0, 1.0)])
            ts = np.cumsum(rng.uniform(0.2, 0.6, 4))
            points3 = start + ts[:, None] * direction
            pixels = project_points(camera, points3)
            assert cross_ratio(*pixels) == pytest.approx(cross_ratio(*points3, dim=3), abs=1e-9)
