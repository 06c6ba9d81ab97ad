"""Shared exception hierarchy for cone_tools."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from cone_tools.pnp.models import PnPResult


class ConeToolsError(Exception):
    """Base exception for all cone_tools errors."""


class ValidationError(ConeToolsError, ValueError):
    """Input validation failed.

    Inherits from ValueError so callers that already catch ValueError for
    bad arguments keep working.
    """


class EmptyDataset(ConeToolsError):
    """An operation that needs samples received none."""


class ConfigurationError(ConeToolsError):
    """Missing, unknown or invalid configuration key."""

    def __init__(self, message: str, key_path: str | None = None) -> None:
        super().__init__(message)
        self.key_path = key_path

    def __str__(self) -> str:
        base = super().__str__()
        if self.key_path:
            return f"{base} (at {self.key_path})"
        return base


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


class GeometryError(ConeToolsError):
    """Base for projective-geometry failures."""


class NonPositiveDepth(GeometryError):
    """A point at or behind the camera plane was projected."""


class DegenerateConfiguration(GeometryError):
    """Coincident points make a ratio of distances undefined."""


class ParallelRays(GeometryError):
    """Two back-projected rays are (numerically) parallel."""


class InsufficientPoints(GeometryError):
    """Too few samples for the requested fit."""


class SingularSystem(GeometryError):
    """A least-squares system is rank deficient."""


# ---------------------------------------------------------------------------
# Keypoint regressor
# ---------------------------------------------------------------------------


class RegressorError(ConeToolsError):
    """Base for keypoint regressor failures."""


class NonPositiveOutput(RegressorError):
    """A layer would produce an empty spatial extent."""


class ShapeMismatch(RegressorError):
    """An input or layer chain does not have the expected shape."""


class DivergedLoss(RegressorError):
    """Training loss became NaN or infinite."""

    def __init__(self, message: str, epoch: int | None = None, batch: int | None = None) -> None:
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


# ---------------------------------------------------------------------------
# PnP
# ---------------------------------------------------------------------------


class PnPError(ConeToolsError):
    """Base for pose estimation failures."""


class DegenerateKeypoints(PnPError):
    """Keypoints do not describe an upright cone of usable size."""


class NotConverged(PnPError):
    """Iterative refinement hit its iteration cap."""

    def __init__(self, message: str, result: PnPResult | None = None) -> None:
        super().__init__(message)
        self.result = result


class BehindCamera(PnPError):
    """A pose places a model point at or behind the camera plane."""


class NoConsensus(PnPError):
    """No correspondence subset gathered enough inliers."""

    def __init__(self, message: str, inlier_count: int = 0) -> None:
        super().__init__(message)
        self.inlier_count = inlier_count


# ---------------------------------------------------------------------------
# Synthetic world
# ---------------------------------------------------------------------------


class SceneError(ConeToolsError):
    """Base for synthetic scene and rendering failures."""


class InfeasibleFrustum(SceneError):
    """No lateral placement keeps a cone inside the field of view."""


class TooSmall(SceneError):
    """The cone's apparent height is below the rendering threshold."""


class OutOfFrame(SceneError):
    """The cone does not project into the image."""


class CollapsedBox(SceneError):
    """A bounding-box perturbation inverted or collapsed the box."""


class FileFormatError(ConeToolsError):
    """Failed to decode a binary file."""

    def __init__(self, message: str, source: Any = None) -> None:
        super().__init__(message)
        self.source = source

    def __str__(self) -> str:
        base = super().__str__()
        if self.source is not None:
            return f"{base} [{self.source}]"
        return base


class CorruptFile(FileFormatError):
    """Bad magic, truncated payload or trailing bytes."""


class VersionMismatch(FileFormatError):
    """File was written by an unsupported format version."""


# ---------------------------------------------------------------------------
# Stereo and pipeline
# ---------------------------------------------------------------------------


class StereoError(ConeToolsError):
    """Base for stereo propagation failures."""


class BehindRightCamera(StereoError):
    """The mono estimate lies behind the right camera."""


class OutOfRightFrame(StereoError):
    """The propagated box misses the right image entirely."""


class InsufficientPairs(StereoError):
    """Too few keypoint pairs survived triangulation."""


class PipelineError(ConeToolsError):
    """Base for orchestration failures."""


class EmptyScene(PipelineError):
    """A frame was requested for a scene without cones."""


__all__ = [
    "ConeToolsError",
    "ValidationError",
    "ConfigurationError",
    "GeometryError",
    "NonPositiveDepth",
    "DegenerateConfiguration",
    "ParallelRays",
    "InsufficientPoints",
    "SingularSystem",
    "RegressorError",
    "NonPositiveOutput",
    "ShapeMismatch",
    "EmptyDataset",
    "DivergedLoss",
    "PnPError",
    "DegenerateKeypoints",
    "NotConverged",
    "BehindCamera",
    "NoConsensus",
    "SceneError",
    "InfeasibleFrustum",
    "TooSmall",
    "OutOfFrame",
    "CollapsedBox",
    "FileFormatError",
    "CorruptFile",
    "VersionMismatch",
    "StereoError",
    "BehindRightCamera",
    "OutOfRightFrame",
    "InsufficientPairs",
    "PipelineError",
    "EmptyScene",
]
