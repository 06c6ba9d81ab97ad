"""Projective-geometry kernel: points, poses, pinhole projection, cross-ratio,
two-view triangulation and quadratic curve fitting.

All functions are pure; value types are immutable after construction.
"""

from .cross_ratio import DEGENERACY_EPSILON, cross_ratio
from .fitting import eval_quadratic, fit_quadratic
from .models import ORTHONORMAL_TOLERANCE, CameraModel, Point2, Point3, RigidPose
from .projection import backproject, pixel_rays, project, project_points, transform
from .triangulation import MIN_RAY_ANGLE, triangulate_two_view

__all__ = [
    # Types
    "Point2",
    "Point3",
    "CameraModel",
    "RigidPose",
    "ORTHONORMAL_TOLERANCE",
    # Projection
    "project",
    "project_points",
    "pixel_rays",
    "backproject",
    "transform",
    # Invariants
    "cross_ratio",
    "DEGENERACY_EPSILON",
    # Two-view
    "triangulate_two_view",
    "MIN_RAY_ANGLE",
    # Fitting
    "fit_quadratic",
    "eval_quadratic",
]
