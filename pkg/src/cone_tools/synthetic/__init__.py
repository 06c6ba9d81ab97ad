"""Synthetic ground-truth world: scenes, detections, rendered patches and datasets."""

from .dataset import generate_dataset, read_dataset, write_dataset
from .detection import DEFAULT_MARGIN_FRAC, dilate, perturb_bbox, simulate_detection
from .models import BBox, NoiseConfig, PatchSample, PlacedCone, ScenePlan
from .render import (
    BAND_COLORS,
    Augmentation,
    cone_bands,
    jitter_colors,
    project_cone,
    render_patch,
)
from .scene import DEFAULT_FOV_MARGIN, generate_scene, lateral_extent

__all__ = [
    # Types
    "BBox",
    "NoiseConfig",
    "PatchSample",
    "PlacedCone",
    "ScenePlan",
    "Augmentation",
    # Scenes
    "generate_scene",
    "lateral_extent",
    "DEFAULT_FOV_MARGIN",
    # Detection
    "simulate_detection",
    "perturb_bbox",
    "dilate",
    "DEFAULT_MARGIN_FRAC",
    # Rendering
    "render_patch",
    "project_cone",
    "cone_bands",
    "jitter_colors",
    "BAND_COLORS",
    # Datasets
    "generate_dataset",
    "write_dataset",
    "read_dataset",
]
