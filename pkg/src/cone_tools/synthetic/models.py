"""Synthetic scene, detection box and patch sample types."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import Field, model_validator

from cone_tools.cone.models import ColorClass, ConeGeometry, KeypointFrame, KeypointSet
from cone_tools.core.models import FrozenModel
from cone_tools.geometry.models import CameraModel, Point3


class NoiseConfig(FrozenModel):
    """Rendering, detection and measurement noise knobs.

    These are calibration knobs for the synthetic world, not claims about
    real camera statistics.
    """

    keypoint_sigma_px: float = Field(default=0.0, ge=0)
    pixel_noise_max: float = Field(default=0.05, ge=0, le=0.5)
    brightness_jitter: float = Field(default=0.2, ge=0, lt=1)
    saturation_jitter: float = Field(default=0.2, ge=0, lt=1)
    contrast_jitter: float = Field(default=0.2, ge=0, lt=1)
    bbox_margin_frac: float = Field(default=0.15, ge=0)
    bbox_perturbation: float = Field(default=0.0, ge=0, le=0.5)
    detector_jitter: float = Field(default=0.03, ge=0, le=0.5)
    min_apparent_height_px: float = Field(default=8.0, gt=0)
    patch_size: int = Field(default=80, ge=8)

    @classmethod
    def clean(cls) -> Self:
        """No photometric noise, jitter or perturbation."""
        return cls(
            pixel_noise_max=0.0,
            brightness_jitter=0.0,
            saturation_jitter=0.0,
            contrast_jitter=0.0,
            detector_jitter=0.0,
        )


class BBox(FrozenModel):
    """Axis-aligned detection box in image pixels (top-left corner + size)."""

    x: float
    y: float
    w: float = Field(gt=0)
    h: float = Field(gt=0)

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h

    @property
    def center(self) -> tuple[float, float]:
        return self.x + 0.5 * self.w, self.y + 0.5 * self.h

    @classmethod
    def from_edges(cls, left: float, top: float, right: float, bottom: float) -> Self:
        return cls(x=left, y=top, w=right - left, h=bottom - top)

    def is_truncated(self, width: int, height: int) -> bool:
        """True when the box extends past the image borders."""
        return self.x < 0 or self.y < 0 or self.right > width or self.bottom > height

    def intersects(self, width: int, height: int) -> bool:
        return self.right > 0 and self.bottom > 0 and self.x < width and self.y < height

    def contains(self, points: NDArray[np.float64]) -> bool:
        pts = np.atleast_2d(points)
        return bool(
            np.all(
                (pts[:, 0] >= self.x)
                & (pts[:, 0] <= self.right)
                & (pts[:, 1] >= self.y)
                & (pts[:, 1] <= self.bottom)
            )
        )

    def to_patch(self, points: NDArray[np.float64], patch_size: int) -> NDArray[np.float64]:
        """Map image-frame ``(N, 2)`` points into the resampled patch frame."""
        pts = np.asarray(points, dtype=np.float64)
        scale = np.array([patch_size / self.w, patch_size / self.h])
        return (pts - np.array([self.x, self.y])) * scale

    def to_image(self, points: NDArray[np.float64], patch_size: int) -> NDArray[np.float64]:
        """Inverse of :meth:`to_patch`."""
        pts = np.asarray(points, dtype=np.float64)
        scale = np.array([self.w / patch_size, self.h / patch_size])
        return pts * scale + np.array([self.x, self.y])


class PlacedCone(FrozenModel):
    """A cone standing upright with its base center at ``position`` (camera frame)."""

    geometry: ConeGeometry
    position: Point3

    @property
    def color_class(self) -> ColorClass:
        return self.geometry.color_class


class ScenePlan(FrozenModel):
    camera: CameraModel
    cones: tuple[PlacedCone, ...]
    seed: int
    range_min: float = Field(default=4.0, gt=0)
    range_max: float = Field(default=15.0, gt=0)

    @model_validator(mode="after")
    def _cones_in_range(self) -> Self:
        for index, cone in enumerate(self.cones):
            if not self.range_min <= cone.position.z <= self.range_max:
                raise ValueError(
                    f"cone {index} at z={cone.position.z} outside "
                    f"[{self.range_min}, {self.range_max}]"
                )
        return self


@dataclass(frozen=True, eq=False)
class PatchSample:
    """Rendered patch with exact patch-frame keypoint annotations."""

    patch: NDArray[np.float32]
    keypoints: KeypointSet
    bbox: BBox
    position: Point3
    color_class: ColorClass

    def __post_init__(self) -> None:
        patch = np.ascontiguousarray(self.patch, dtype=np.float32)
        if patch.ndim != 3 or patch.shape[2] != 3 or patch.shape[0] != patch.shape[1]:
            raise ValueError(f"patch must be (P, P, 3), got {patch.shape}")
        if self.keypoints.frame is not KeypointFrame.PATCH:
            raise ValueError("PatchSample keypoints must be in the patch frame")
        object.__setattr__(self, "patch", patch)

    @property
    def patch_size(self) -> int:
        return int(self.patch.shape[0])

    def image_keypoints(self) -> KeypointSet:
        """Annotated keypoints mapped back to full-image pixels."""
        image = self.bbox.to_image(self.keypoints.as_array(), self.patch_size)
        return KeypointSet.from_array(image, KeypointFrame.IMAGE)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PatchSample):
            return NotImplemented
        return (
            np.array_equal(self.patch, other.patch)
            and np.array_equal(self.keypoints.as_array(), other.keypoints.as_array())
            and self.bbox == other.bbox
            and self.position == other.position
            and self.color_class == other.color_class
        )

    __hash__ = None  # type: ignore[assignment]


__all__ = ["NoiseConfig", "BBox", "PlacedCone", "ScenePlan", "PatchSample"]
