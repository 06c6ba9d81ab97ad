"""PnP result and robust-fit configuration types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import Field, model_validator

from cone_tools.core.exceptions import NotConverged
from cone_tools.core.models import FrozenModel
from cone_tools.geometry.models import Point3, RigidPose


class RansacConfig(FrozenModel):
    """Exhaustive-subset consensus settings."""

    subset_size: int = Field(default=4, ge=4, le=7)
    inlier_threshold: float = Field(default=2.0, gt=0)
    min_inliers: int = Field(default=5, ge=4, le=7)

    @model_validator(mode="after")
    def _min_inliers_reachable(self) -> Self:
        if self.min_inliers < self.subset_size:
            # A subset always counts itself, so fewer would accept anything.
            raise ValueError(
                f"min_inliers={self.min_inliers} below subset_size={self.subset_size}"
            )
        return self


@dataclass(frozen=True, eq=False)
class PnPResult:
    """Camera <- cone-frame pose for one cone.

    Only ``position`` is consumed downstream; the rotation is kept for
    diagnostics since the cone's symmetry makes it irrelevant.
    """

    pose: RigidPose
    mean_reproj_error: float
    per_point_residuals: NDArray[np.float64]
    inlier_mask: tuple[bool, ...]
    iterations: int
    converged: bool = True
    cost_history: tuple[float, ...] = field(default=())

    @property
    def position(self) -> Point3:
        return Point3.from_array(self.pose.translation)

    @property
    def inlier_count(self) -> int:
        return sum(self.inlier_mask)

    def require_converged(self) -> Self:
        """Return self, or raise NotConverged carrying this result."""
        if not self.converged:
            raise NotConverged(
                f"refinement stopped after {self.iterations} iterations", result=self
            )
        return self


__all__ = ["RansacConfig", "PnPResult"]
