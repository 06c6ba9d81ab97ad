"""Stereo shortcut: propagate the mono box to the right image, then triangulate keypoints."""

from .models import MIN_BASELINE, StereoConfig, StereoRig
from .propagation import MIN_PAIRS, base_estimates, propagate_bbox, stereo_refine

__all__ = [
    "StereoConfig",
    "StereoRig",
    "MIN_BASELINE",
    "MIN_PAIRS",
    "propagate_bbox",
    "base_estimates",
    "stereo_refine",
]
