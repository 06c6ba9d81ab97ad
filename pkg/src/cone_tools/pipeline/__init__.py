"""Per-frame orchestration and the quantitative experiment harness."""

from .estimate import estimate_frame, measure_cone, observe_keypoints
from .experiments import (
    ExperimentResult,
    depth_bins,
    exp_bbox_perturbation,
    exp_depth_accuracy,
    exp_kp_variance,
    stereo_eval,
)
from .models import (
    ConeMeasurement,
    ConeObservation,
    FrameEstimate,
    KeypointMode,
    SkippedCone,
    Source,
)
from .reporting import (
    observations_table,
    skipped_table,
    write_csv,
    write_experiment,
    write_metadata,
)

__all__ = [
    # Types
    "ConeObservation",
    "SkippedCone",
    "FrameEstimate",
    "ConeMeasurement",
    "Source",
    "KeypointMode",
    "ExperimentResult",
    # Pipeline
    "estimate_frame",
    "measure_cone",
    "observe_keypoints",
    # Experiments
    "depth_bins",
    "exp_depth_accuracy",
    "exp_bbox_perturbation",
    "exp_kp_variance",
    "stereo_eval",
    # Reporting
    "write_csv",
    "write_experiment",
    "write_metadata",
    "observations_table",
    "skipped_table",
]
