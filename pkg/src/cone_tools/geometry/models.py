"""Value types for the projective-geometry kernel.

Conventions: pixel origin top-left, x right, y down. Camera frame x right,
y down, z forward.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import Field, model_validator
from scipy.spatial.transform import Rotation

from cone_tools.core.exceptions import ValidationError
from cone_tools.core.models import FrozenModel

ORTHONORMAL_TOLERANCE = 1e-9


class Point2(FrozenModel):
    """Image point in pixels."""

    x: float
    y: float

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y], dtype=np.float64)

    @classmethod
    def from_array(cls, values: ArrayLike) -> Self:
        x, y = np.asarray(values, dtype=np.float64).reshape(2)
        return cls(x=float(x), y=float(y))


class Point3(FrozenModel):
    """Point in meters."""

    x: float
    y: float
    z: float

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @classmethod
    def from_array(cls, values: ArrayLike) -> Self:
        x, y, z = np.asarray(values, dtype=np.float64).reshape(3)
        return cls(x=float(x), y=float(y), z=float(z))


class CameraModel(FrozenModel):
    """Pinhole intrinsics and sensor size. No distortion model."""

    fx: float = Field(default=600.0, gt=0)
    fy: float = Field(default=600.0, gt=0)
    cx: float = 800.0
    cy: float = 400.0
    width: int = Field(default=1600, gt=0)
    height: int = Field(default=800, gt=0)

    @model_validator(mode="after")
    def _principal_point_on_sensor(self) -> Self:
        if not 0 <= self.cx < self.width:
            raise ValueError(f"cx={self.cx} outside [0, {self.width})")
        if not 0 <= self.cy < self.height:
            raise ValueError(f"cy={self.cy} outside [0, {self.height})")
        return self

    def intrinsic_matrix(self) -> NDArray[np.float64]:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]],
            dtype=np.float64,
        )

    def contains(self, u: float, v: float) -> bool:
        """True when the pixel coordinate lies on the sensor."""
        return 0.0 <= u < self.width and 0.0 <= v < self.height


def _frozen(values: ArrayLike, shape: tuple[int, ...], name: str) -> NDArray[np.float64]:
    array = np.array(values, dtype=np.float64)
    if array.size != int(np.prod(shape)):
        raise ValidationError(f"{name} must have shape {shape}, got {array.shape}")
    array = array.reshape(shape)
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name} must be finite")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class RigidPose:
    """Rigid transform ``x -> R @ x + t``.

    The rotation must be orthonormal with determinant +1 within
    :data:`ORTHONORMAL_TOLERANCE`.
    """

    rotation: NDArray[np.float64]
    translation: NDArray[np.float64]

    def __post_init__(self) -> None:
        rotation = _frozen(self.rotation, (3, 3), "rotation")
        translation = _frozen(self.translation, (3,), "translation")
        drift = np.max(np.abs(rotation.T @ rotation - np.eye(3)))
        if drift > ORTHONORMAL_TOLERANCE:
            raise ValidationError(f"rotation is not orthonormal (drift {drift:.3e})")
        det = float(np.linalg.det(rotation))
        if abs(det - 1.0) > ORTHONORMAL_TOLERANCE:
            raise ValidationError(f"rotation determinant {det:.12f} is not +1")
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> RigidPose:
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_rotvec(cls, rotvec: ArrayLike, translation: ArrayLike) -> RigidPose:
        """Build a pose from an axis-angle vector (radians) and translation."""
        matrix = Rotation.from_rotvec(np.asarray(rotvec, dtype=np.float64)).as_matrix()
        return cls(matrix, translation)

    @classmethod
    def from_translation(cls, translation: ArrayLike) -> RigidPose:
        return cls(np.eye(3), translation)

    def rotvec(self) -> NDArray[np.float64]:
        return Rotation.from_matrix(self.rotation).as_rotvec()

    def apply(self, points: ArrayLike) -> NDArray[np.float64]:
        """Transform one point ``(3,)`` or a stack ``(N, 3)``."""
        array = np.asarray(points, dtype=np.float64)
        return array @ self.rotation.T + self.translation

    def compose(self, inner: RigidPose) -> RigidPose:
        """Return ``self ∘ inner`` (``inner`` is applied first)."""
        return RigidPose(
            self.rotation @ inner.rotation,
            self.rotation @ inner.translation + self.translation,
        )

    def inverse(self) -> RigidPose:
        rotation_t = self.rotation.T
        return RigidPose(rotation_t, -rotation_t @ self.translation)

    @property
    def baseline(self) -> float:
        """Norm of the translation component."""
        return float(np.linalg.norm(self.translation))

    def __repr__(self) -> str:
        return (
            f"RigidPose(rotvec={np.round(self.rotvec(), 6).tolist()}, "
            f"translation={np.round(self.translation, 6).tolist()})"
        )


__all__ = [
    "ORTHONORMAL_TOLERANCE",
    "Point2",
    "Point3",
    "CameraModel",
    "RigidPose",
]
