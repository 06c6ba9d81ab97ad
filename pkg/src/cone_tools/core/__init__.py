"""Core utilities for cone_tools.

This module provides shared infrastructure used across all cone_tools packages:
- Exception hierarchy
- Immutable pydantic base models
- Bounded resampling and seed derivation
- Little-endian binary helpers for the file formats
"""

from .binary import ensure_eof, read_exact, read_header, write_header
from .exceptions import (
    ConeToolsError,
    ConfigurationError,
    CorruptFile,
    EmptyDataset,
    FileFormatError,
    GeometryError,
    PipelineError,
    PnPError,
    RegressorError,
    SceneError,
    StereoError,
    ValidationError,
    VersionMismatch,
)
from .models import FrozenModel, RecordModel
from .resilience import DEFAULT_MAX_ATTEMPTS, derive_rng, derive_seed, resample, resampler

__all__ = [
    # Exceptions
    "ConeToolsError",
    "ValidationError",
    "ConfigurationError",
    "EmptyDataset",
    "GeometryError",
    "RegressorError",
    "PnPError",
    "SceneError",
    "StereoError",
    "PipelineError",
    "FileFormatError",
    "CorruptFile",
    "VersionMismatch",
    # Models
    "FrozenModel",
    "RecordModel",
    # Resilience
    "DEFAULT_MAX_ATTEMPTS",
    "resampler",
    "resample",
    "derive_seed",
    "derive_rng",
    # Binary
    "write_header",
    "read_header",
    "read_exact",
    "ensure_eof",
]
