"""Stereo rig and stereo settings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Self

import numpy as np
from pydantic import Field, model_validator

from cone_tools.core.exceptions import ValidationError
from cone_tools.core.models import FrozenModel
from cone_tools.geometry.models import CameraModel, RigidPose

MIN_BASELINE = 1e-9


class StereoConfig(FrozenModel):
    """Rig baseline and the depth band the stereo pair is calibrated for."""

    baseline: float = Field(default=0.5, gt=0)
    calibrated_min: float = Field(default=2.0, gt=0)
    calibrated_max: float = Field(default=8.0, gt=0)

    @model_validator(mode="after")
    def _ordered_range(self) -> Self:
        if not self.calibrated_min < self.calibrated_max:
            raise ValueError(
                f"calibrated_min={self.calibrated_min} must be below "
                f"calibrated_max={self.calibrated_max}"
            )
        return self

    def in_calibrated_range(self, z: float) -> bool:
        return self.calibrated_min <= z <= self.calibrated_max


@dataclass(frozen=True, eq=False)
class StereoRig:
    """Two cameras; ``left_to_right`` maps left-frame points into the right frame.

    Raises:
        ValidationError: If the baseline is zero.
    """

    left: CameraModel
    right: CameraModel
    left_to_right: RigidPose

    def __post_init__(self) -> None:
        if self.left_to_right.baseline < MIN_BASELINE:
            raise ValidationError("stereo rig needs a non-zero baseline")

    @classmethod
    def from_baseline(
        cls, cam: CameraModel, baseline: float, right: CameraModel | None = None
    ) -> StereoRig:
        """Rectified pair with the right camera ``baseline`` meters along +x."""
        return cls(
            left=cam,
            right=right or cam,
            left_to_right=RigidPose.from_translation(np.array([-baseline, 0.0, 0.0])),
        )

    @property
    def baseline(self) -> float:
        return self.left_to_right.baseline


__all__ = ["MIN_BASELINE", "StereoConfig", "StereoRig"]
