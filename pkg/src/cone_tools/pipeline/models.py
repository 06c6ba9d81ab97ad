"""Per-cone pipeline outputs."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Self

from pydantic import Field, model_validator

from cone_tools.cone.models import ColorClass, KeypointSet
from cone_tools.core.models import RecordModel
from cone_tools.geometry.models import Point3
from cone_tools.pnp.models import PnPResult
from cone_tools.synthetic.models import BBox


class Source(StrEnum):
    MONO = "mono"
    STEREO = "stereo"


class KeypointMode(StrEnum):
    """Where the keypoints fed to the solver come from."""

    ANNOTATED = "annotated"
    REGRESSED = "regressed"


class ConeObservation(RecordModel):
    """One estimated cone position in the left camera frame."""

    index: int = Field(ge=0)
    position: Point3
    color_class: ColorClass
    mean_reproj_error: float = Field(ge=0)
    inlier_count: int = Field(ge=4, le=7)
    source: Source = Source.MONO

    @model_validator(mode="after")
    def _in_front(self) -> Self:
        if self.position.z <= 0:
            raise ValueError(f"observation at z={self.position.z} is not in front of the camera")
        return self


class SkippedCone(RecordModel):
    """A cone that produced no observation; ``reason`` is the exception class name."""

    index: int
    reason: str
    detail: str
    true_position: Point3


@dataclass(frozen=True)
class ConeMeasurement:
    """Intermediate products of one mono solve."""

    bbox: BBox
    keypoints: KeypointSet
    result: PnPResult


@dataclass(frozen=True)
class FrameEstimate:
    observations: list[ConeObservation] = field(default_factory=list)
    skipped: list[SkippedCone] = field(default_factory=list)

    @property
    def recall(self) -> float:
        total = len(self.observations) + len(self.skipped)
        return len(self.observations) / total if total else 0.0


__all__ = [
    "Source",
    "KeypointMode",
    "ConeObservation",
    "SkippedCone",
    "ConeMeasurement",
    "FrameEstimate",
]
