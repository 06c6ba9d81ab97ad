"""Height-based initialization and Levenberg-Marquardt PnP refinement.

The cone keypoints are coplanar, which makes a homogeneous DLT rank
deficient. Instead the pose is seeded from the apparent cone height
(similar triangles) and refined by damped Gauss-Newton over six pose
parameters: an axis-angle rotation increment composed on the left of the
current rotation, and a translation increment.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

from cone_tools.cone.keypoints import canonical_keypoint_array, cone_pose
from cone_tools.cone.models import ConeGeometry, KeypointFrame, KeypointSet
from cone_tools.core.exceptions import (
    BehindCamera,
    DegenerateKeypoints,
    InsufficientPoints,
    ValidationError,
)
from cone_tools.geometry.models import CameraModel, RigidPose

from .models import PnPResult

logger = logging.getLogger(__name__)

MIN_APPARENT_HEIGHT_PX = 2.0
MIN_CORRESPONDENCES = 4
# Keypoint pairs closer in height than this fraction of the cone say nothing about scale.
MIN_HEIGHT_GAP = 1e-6

MAX_ITERATIONS = 100
STEP_TOLERANCE = 1e-10
COST_TOLERANCE = 1e-12
INITIAL_DAMPING = 1e-3
DAMPING_UP = 10.0
DAMPING_DOWN = 0.1


def depth_init(cam: CameraModel, kps: KeypointSet, g: ConeGeometry) -> RigidPose:
    """Seed pose from the apparent height between apex and base midpoint.

    ``z0 = fy * height / (base_mid.y - apex.y)``; x and y come from
    back-projecting the base midpoint to ``z0``. The rotation is the upright,
    camera-facing orientation.

    Raises:
        DegenerateKeypoints: If the apparent height is below 2 px (this also
            covers an apex drawn below the base).
    """
    if kps.frame is not KeypointFrame.IMAGE:
        raise ValidationError("depth_init expects image-frame keypoints")
    points = kps.as_array()
    apex = points[0]
    base_mid = 0.5 * (points[3] + points[6])
    apparent = float(base_mid[1] - apex[1])
    if apparent < MIN_APPARENT_HEIGHT_PX:
        raise DegenerateKeypoints(f"apparent cone height {apparent:.3f} px is too small")
    z0 = cam.fy * g.height / apparent
    x0 = (base_mid[0] - cam.cx) * z0 / cam.fx
    y0 = (base_mid[1] - cam.cy) * z0 / cam.fy
    return cone_pose([x0, y0, z0])


def robust_depth_init(cam: CameraModel, kps: KeypointSet, g: ConeGeometry) -> RigidPose:
    """Seed pose that tolerates a minority of displaced keypoints.

    Every pair of keypoints at different heights on the cone implies an
    apparent cone height; their median fixes ``z0``. Each keypoint then
    implies a base-center pixel and the per-axis median of those is
    back-projected to ``z0``. On exact projections the seed equals
    :func:`depth_init`.

    Raises:
        DegenerateKeypoints: If no pair is ordered top to bottom or the
            median apparent height is below 2 px.
    """
    if kps.frame is not KeypointFrame.IMAGE:
        raise ValidationError("robust_depth_init expects image-frame keypoints")
    points = kps.as_array()
    model = canonical_keypoint_array(g)
    heights = model[:, 1]

    upper, lower = np.triu_indices(len(points), k=1)
    rise = heights[upper] - heights[lower]
    drop = points[lower, 1] - points[upper, 1]
    usable = np.abs(rise) > MIN_HEIGHT_GAP * g.height
    implied = drop[usable] * g.height / rise[usable]
    implied = implied[implied > 0.0]
    if implied.size == 0:
        raise DegenerateKeypoints("no keypoint pair is ordered top to bottom")
    apparent = float(np.median(implied))
    if apparent < MIN_APPARENT_HEIGHT_PX:
        raise DegenerateKeypoints(f"apparent cone height {apparent:.3f} px is too small")

    z0 = cam.fy * g.height / apparent
    base_u = float(np.median(points[:, 0] - cam.fx * model[:, 0] / z0))
    base_v = float(np.median(points[:, 1] + apparent * heights / g.height))
    x0 = (base_u - cam.cx) * z0 / cam.fx
    y0 = (base_v - cam.cy) * z0 / cam.fy
    return cone_pose([x0, y0, z0])


def as_correspondences(
    model_pts: ArrayLike, image_pts: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    model = np.asarray(model_pts, dtype=np.float64).reshape(-1, 3)
    image = np.asarray(image_pts, dtype=np.float64).reshape(-1, 2)
    if len(model) != len(image):
        raise ValidationError(f"{len(model)} model points vs {len(image)} image points")
    return model, image


def reprojection_error(
    cam: CameraModel, pose: RigidPose, model_pts: ArrayLike, image_pts: ArrayLike
) -> NDArray[np.float64]:
    """Per-point pixel distance between projected model points and measurements.

    Raises:
        BehindCamera: If any model point has camera depth ``<= 0``.
    """
    model, image = as_correspondences(model_pts, image_pts)
    camera_pts = pose.apply(model)
    if np.any(camera_pts[:, 2] <= 0.0):
        raise BehindCamera("pose places a model point behind the camera")
    projected = _project(cam, camera_pts)
    return np.linalg.norm(projected - image, axis=1)


def _project(cam: CameraModel, camera_pts: NDArray[np.float64]) -> NDArray[np.float64]:
    z = camera_pts[:, 2]
    return np.column_stack(
        (cam.cx + cam.fx * camera_pts[:, 0] / z, cam.cy + cam.fy * camera_pts[:, 1] / z)
    )


def _skew(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    out = np.zeros((len(vectors), 3, 3))
    out[:, 0, 1] = -vectors[:, 2]
    out[:, 0, 2] = vectors[:, 1]
    out[:, 1, 0] = vectors[:, 2]
    out[:, 1, 2] = -vectors[:, 0]
    out[:, 2, 0] = -vectors[:, 1]
    out[:, 2, 1] = vectors[:, 0]
    return out


def _linearize(
    cam: CameraModel,
    rotation: NDArray[np.float64],
    translation: NDArray[np.float64],
    model: NDArray[np.float64],
    image: NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Stacked residuals ``(2M,)`` and Jacobian ``(2M, 6)`` at the given pose."""
    rotated = model @ rotation.T
    camera_pts = rotated + translation
    x, y, z = camera_pts[:, 0], camera_pts[:, 1], camera_pts[:, 2]
    residuals = (_project(cam, camera_pts) - image).reshape(-1)

    d_proj = np.zeros((len(model), 2, 3))
    d_proj[:, 0, 0] = cam.fx / z
    d_proj[:, 0, 2] = -cam.fx * x / (z * z)
    d_proj[:, 1, 1] = cam.fy / z
    d_proj[:, 1, 2] = -cam.fy * y / (z * z)

    # d(exp(w) R X)/dw at w = 0 is -[R X]_x
    d_rot = d_proj @ -_skew(rotated)
    jacobian = np.concatenate((d_rot, d_proj), axis=2).reshape(-1, 6)
    return residuals, jacobian


def _cost(
    cam: CameraModel,
    rotation: NDArray[np.float64],
    translation: NDArray[np.float64],
    model: NDArray[np.float64],
    image: NDArray[np.float64],
) -> float | None:
    camera_pts = model @ rotation.T + translation
    if np.any(camera_pts[:, 2] <= 0.0):
        return None
    residuals = _project(cam, camera_pts) - image
    return float(np.sum(residuals * residuals))


def refine_lm(
    cam: CameraModel,
    model_pts: ArrayLike,
    image_pts: ArrayLike,
    init: RigidPose,
    use_mask: ArrayLike | None = None,
) -> PnPResult:
    """Minimize the summed squared reprojection error over the pose.

    Stops when the step norm drops below 1e-10, an accepted step lowers the
    cost by less than 1e-12, or after 100 iterations. Damping starts at 1e-3,
    grows x10 on a rejected step and shrinks x0.1 on an accepted one; steps
    that would move a point behind the camera are rejected. Accepted steps
    strictly lower the cost.

    A result that hit the iteration cap is returned with
    ``converged=False``.

    Raises:
        InsufficientPoints: Fewer than 4 correspondences are enabled.
        BehindCamera: The initial or refined pose puts a model point at
            ``z <= 0``.
    """
    model, image = as_correspondences(model_pts, image_pts)
    mask = (
        np.ones(len(model), dtype=bool)
        if use_mask is None
        else np.asarray(use_mask, dtype=bool).reshape(-1)
    )
    if mask.shape != (len(model),):
        raise ValidationError(f"mask has {mask.size} entries for {len(model)} points")
    if int(mask.sum()) < MIN_CORRESPONDENCES:
        raise InsufficientPoints(f"need {MIN_CORRESPONDENCES} correspondences, got {mask.sum()}")
    used_model, used_image = model[mask], image[mask]

    rotation = init.rotation.copy()
    translation = init.translation.copy()
    if np.any((model @ rotation.T + translation)[:, 2] <= 0.0):
        raise BehindCamera("initial pose places a model point behind the camera")

    residuals, jacobian = _linearize(cam, rotation, translation, used_model, used_image)
    cost = float(residuals @ residuals)
    history = [cost]
    damping = INITIAL_DAMPING
    iterations = 0
    converged = False

    while iterations < MAX_ITERATIONS:
        iterations += 1
        gradient = jacobian.T @ residuals
        hessian = jacobian.T @ jacobian
        system = hessian + damping * np.diag(np.diag(hessian))
        try:
            step = np.linalg.solve(system, -gradient)
        except np.linalg.LinAlgError:
            damping *= DAMPING_UP
            continue
        if float(np.linalg.norm(step)) < STEP_TOLERANCE:
            converged = True
            break

        candidate_rotation = Rotation.from_rotvec(step[:3]).as_matrix() @ rotation
        candidate_translation = translation + step[3:]
        candidate_cost = _cost(
            cam, candidate_rotation, candidate_translation, used_model, used_image
        )
        if candidate_cost is None or candidate_cost >= cost:
            damping *= DAMPING_UP
            continue

        decrease = cost - candidate_cost
        rotation, translation = candidate_rotation, candidate_translation
        residuals, jacobian = _linearize(cam, rotation, translation, used_model, used_image)
        cost = float(residuals @ residuals)
        history.append(cost)
        damping *= DAMPING_DOWN
        if decrease < COST_TOLERANCE:
            converged = True
            break

    if not converged:
        logger.warning("LM stopped at the iteration cap (cost %.6g)", cost)

    pose = RigidPose(rotation, translation)
    per_point = reprojection_error(cam, pose, model, image)
    logger.debug(
        "LM finished in %d iterations, cost %.3e, z=%.4f", iterations, cost, translation[2]
    )
    return PnPResult(
        pose=pose,
        mean_reproj_error=float(np.mean(per_point[mask])),
        per_point_residuals=per_point,
        inlier_mask=tuple(bool(v) for v in mask),
        iterations=iterations,
        converged=converged,
        cost_history=tuple(history),
    )


__all__ = [
    "MIN_APPARENT_HEIGHT_PX",
    "MAX_ITERATIONS",
    "STEP_TOLERANCE",
    "COST_TOLERANCE",
    "INITIAL_DAMPING",
    "depth_init",
    "robust_depth_init",
    "refine_lm",
    "reprojection_error",
]
