"""Keypoint regressor: residual CNN, cross-ratio-aware loss, training and model files."""

from .loss import (
    DISTANCE_EPSILON,
    KeypointLossFunction,
    arm_cross_ratios,
    batch_keypoint_loss,
    batch_keypoint_loss_and_gradient,
    keypoint_loss,
    keypoint_loss_gradient,
    keypoint_loss_tensor,
)
from .network import (
    DEFAULT_CHANNELS,
    EVAL_CHUNK,
    OUTPUT_DIM,
    LayerKind,
    LayerSpec,
    RegressorNet,
    default_layer_specs,
    forward,
)
from .predictors import KeypointPredictor, MeanShapePredictor
from .serialization import load_model, save_model
from .shapes import conv_output_shape
from .training import RegressorMetrics, TrainConfig, dataset_loss, evaluate, stack_dataset, train

__all__ = [
    # Network
    "RegressorNet",
    "LayerKind",
    "LayerSpec",
    "default_layer_specs",
    "forward",
    "conv_output_shape",
    "OUTPUT_DIM",
    "DEFAULT_CHANNELS",
    "EVAL_CHUNK",
    # Loss
    "keypoint_loss",
    "keypoint_loss_gradient",
    "batch_keypoint_loss",
    "batch_keypoint_loss_and_gradient",
    "arm_cross_ratios",
    "keypoint_loss_tensor",
    "KeypointLossFunction",
    "DISTANCE_EPSILON",
    # Training
    "TrainConfig",
    "RegressorMetrics",
    "train",
    "evaluate",
    "dataset_loss",
    "stack_dataset",
    # Predictors
    "KeypointPredictor",
    "MeanShapePredictor",
    # Files
    "save_model",
    "load_model",
]
