"""Base model configuration for cone_tools records."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict


class FrozenModel(BaseModel):
    """Immutable value type that rejects unknown fields and non-finite floats.

    Use this for domain values (points, intrinsics, geometry) that are
    shared freely between threads once constructed.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class RecordModel(BaseModel):
    """Immutable output record; tolerates NaN for "not measured" metrics."""

    model_config = ConfigDict(frozen=True, extra="forbid")


__all__ = ["FrozenModel", "RecordModel"]
