"""Per-cone pose from 7 keypoint correspondences: height-based seed,
Levenberg-Marquardt refinement and exhaustive-subset consensus."""

from .models import PnPResult, RansacConfig
from .ransac import minimal_subsets, ransac_pnp
from .solver import depth_init, refine_lm, reprojection_error, robust_depth_init

__all__ = [
    "PnPResult",
    "RansacConfig",
    "depth_init",
    "robust_depth_init",
    "refine_lm",
    "minimal_subsets",
    "ransac_pnp",
    "reprojection_error",
]
