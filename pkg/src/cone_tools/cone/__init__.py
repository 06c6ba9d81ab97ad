"""Parametric traffic-cone model with its seven canonical keypoints."""

from .keypoints import (
    CAMERA_FACING,
    canonical_keypoint_array,
    canonical_keypoints,
    cone_pose,
    keypoints_in_camera,
    model_cross_ratio,
)
from .models import (
    DEFAULT_T2,
    DEFAULT_T3,
    LEFT_ARM,
    MIRROR,
    MODEL_CROSS_RATIO,
    NUM_KEYPOINTS,
    RIGHT_ARM,
    ColorClass,
    ConeGeometry,
    KeypointFrame,
    KeypointSet,
)

__all__ = [
    # Types
    "ColorClass",
    "ConeGeometry",
    "KeypointFrame",
    "KeypointSet",
    # Constants
    "MODEL_CROSS_RATIO",
    "DEFAULT_T2",
    "DEFAULT_T3",
    "NUM_KEYPOINTS",
    "LEFT_ARM",
    "RIGHT_ARM",
    "MIRROR",
    "CAMERA_FACING",
    # Functions
    "canonical_keypoints",
    "canonical_keypoint_array",
    "model_cross_ratio",
    "cone_pose",
    "keypoints_in_camera",
]
