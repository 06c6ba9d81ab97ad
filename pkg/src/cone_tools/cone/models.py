"""Cone geometry and keypoint-set value types."""

from __future__ import annotations

from enum import StrEnum
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import Field, field_validator, model_validator

from cone_tools.core.models import FrozenModel
from cone_tools.geometry.models import Point2

# Cross-ratio of each cone arm measured on the physical cone.
MODEL_CROSS_RATIO = 1.3940842428872968

DEFAULT_T2 = 0.4
# t3 follows from the measured cross-ratio once t2 is pinned.
DEFAULT_T3 = DEFAULT_T2 * MODEL_CROSS_RATIO / (MODEL_CROSS_RATIO - (1.0 - DEFAULT_T2))

NUM_KEYPOINTS = 7

# Keypoint indices (0-based) of the two arms, apex first, base last.
LEFT_ARM = (0, 1, 2, 3)
RIGHT_ARM = (0, 4, 5, 6)
# Index of each keypoint's mirror image across the cone axis.
MIRROR = (0, 4, 5, 6, 1, 2, 3)


class ColorClass(StrEnum):
    """Cone color classes; the enum value order fixes the on-disk code."""

    BLUE = "blue"
    YELLOW = "yellow"
    ORANGE = "orange"

    @property
    def code(self) -> int:
        return list(ColorClass).index(self)

    @classmethod
    def from_code(cls, code: int) -> ColorClass:
        return list(cls)[code]


class KeypointFrame(StrEnum):
    PATCH = "patch"
    IMAGE = "image"


class ConeGeometry(FrozenModel):
    """Parametric cone; ``t2``/``t3`` place the stripe interfaces on each arm."""

    height: float = Field(default=0.325, gt=0)
    base_halfwidth: float = Field(default=0.114, gt=0)
    t2: float = Field(default=DEFAULT_T2, gt=0, lt=1)
    t3: float = Field(default=DEFAULT_T3, gt=0, lt=1)
    color_class: ColorClass = ColorClass.YELLOW

    @model_validator(mode="after")
    def _ordered_stripes(self) -> Self:
        if not self.t2 < self.t3:
            raise ValueError(f"t2={self.t2} must be below t3={self.t3}")
        return self

    def with_color(self, color: ColorClass) -> ConeGeometry:
        return self.model_copy(update={"color_class": color})


class KeypointSet(FrozenModel):
    """Seven ordered cone keypoints.

    Order: apex, left upper stripe, left lower stripe, left base, right upper
    stripe, right lower stripe, right base. Patch-frame coordinates of
    truncated cones may fall outside the patch and are kept as-is.
    """

    points: tuple[Point2, ...]
    frame: KeypointFrame = KeypointFrame.IMAGE

    @field_validator("points")
    @classmethod
    def _seven_points(cls, value: tuple[Point2, ...]) -> tuple[Point2, ...]:
        if len(value) != NUM_KEYPOINTS:
            raise ValueError(f"expected {NUM_KEYPOINTS} keypoints, got {len(value)}")
        return value

    @classmethod
    def from_array(cls, values: ArrayLike, frame: KeypointFrame = KeypointFrame.IMAGE) -> Self:
        """Build from a ``(7, 2)`` array or a flat 14-vector."""
        array = np.asarray(values, dtype=np.float64).reshape(NUM_KEYPOINTS, 2)
        return cls(points=tuple(Point2.from_array(row) for row in array), frame=frame)

    def as_array(self) -> NDArray[np.float64]:
        return np.array([[p.x, p.y] for p in self.points], dtype=np.float64)

    def as_vector(self) -> NDArray[np.float64]:
        """Flat ``(x1, y1, ..., x7, y7)`` regression target."""
        return self.as_array().reshape(-1)

    def arm(self, indices: tuple[int, int, int, int]) -> tuple[Point2, Point2, Point2, Point2]:
        a, b, c, d = (self.points[i] for i in indices)
        return a, b, c, d

    def within(self, size: float) -> bool:
        """True when every point lies in ``[0, size)`` on both axes."""
        array = self.as_array()
        return bool(np.all((array >= 0.0) & (array < size)))


__all__ = [
    "MODEL_CROSS_RATIO",
    "DEFAULT_T2",
    "DEFAULT_T3",
    "NUM_KEYPOINTS",
    "LEFT_ARM",
    "RIGHT_ARM",
    "MIRROR",
    "ColorClass",
    "KeypointFrame",
    "ConeGeometry",
    "KeypointSet",
]
