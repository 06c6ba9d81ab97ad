"""Detect -> regress -> solve, per cone and per frame."""

from __future__ import annotations

import logging

import numpy as np

from cone_tools.cone.keypoints import canonical_keypoint_array
from cone_tools.cone.models import ConeGeometry, KeypointFrame, KeypointSet
from cone_tools.config import RunConfig
from cone_tools.core.exceptions import ConeToolsError, EmptyScene
from cone_tools.core.resilience import derive_rng, derive_seed
from cone_tools.geometry.models import CameraModel, Point3
from cone_tools.pnp.models import RansacConfig
from cone_tools.pnp.ransac import ransac_pnp
from cone_tools.pnp.solver import depth_init, refine_lm, robust_depth_init
from cone_tools.regressor.predictors import KeypointPredictor
from cone_tools.synthetic.detection import perturb_bbox, simulate_detection
from cone_tools.synthetic.models import BBox, NoiseConfig, ScenePlan
from cone_tools.synthetic.render import project_cone, render_patch

from .models import ConeMeasurement, ConeObservation, FrameEstimate, SkippedCone, Source

logger = logging.getLogger(__name__)


def observe_keypoints(
    cam: CameraModel,
    position: Point3,
    g: ConeGeometry,
    predictor: KeypointPredictor | None,
    noise: NoiseConfig,
    rng: np.random.Generator,
    photometric_seed: int,
    *,
    bbox: BBox | None = None,
) -> tuple[BBox, KeypointSet]:
    """Image-frame keypoints of one cone as the solver would see them.

    Without a predictor the exact projections are used (annotated mode);
    otherwise the cone is rendered into the detection box and regressed.
    When no box is given a detection is simulated and perturbed by
    ``noise.bbox_perturbation``. Gaussian noise of ``noise.keypoint_sigma_px``
    is added last.
    """
    exact = project_cone(cam, position, g, noise.min_apparent_height_px)
    if bbox is None:
        bbox = simulate_detection(cam, position, g, noise.bbox_margin_frac)
        bbox = perturb_bbox(bbox, noise.bbox_perturbation, rng)
    if predictor is None:
        image = exact.copy()
    else:
        sample = render_patch(cam, position, g, photometric_seed, bbox=bbox, noise=noise)
        patch_kps = predictor.predict(sample.patch[None])[0].reshape(-1, 2)
        image = bbox.to_image(patch_kps, sample.patch_size)
    if noise.keypoint_sigma_px > 0.0:
        image = image + rng.normal(0.0, noise.keypoint_sigma_px, size=image.shape)
    return bbox, KeypointSet.from_array(image, KeypointFrame.IMAGE)


def measure_cone(
    cam: CameraModel,
    position: Point3,
    g: ConeGeometry,
    predictor: KeypointPredictor | None,
    noise: NoiseConfig,
    rng: np.random.Generator,
    photometric_seed: int,
    *,
    ransac: RansacConfig | None = None,
    bbox: BBox | None = None,
    robust: bool = True,
) -> ConeMeasurement:
    """Observe one cone and solve its pose.

    The consensus fit starts from the outlier-tolerant height seed.
    ``robust=False`` runs plain Levenberg-Marquardt from the apex and base
    seed instead.

    Raises:
        ConeToolsError: Any stage failure (too small, out of frame,
            degenerate keypoints, no consensus, ...).
    """
    bbox, keypoints = observe_keypoints(
        cam, position, g, predictor, noise, rng, photometric_seed, bbox=bbox
    )
    model = canonical_keypoint_array(g)
    image = keypoints.as_array()
    if robust:
        init = robust_depth_init(cam, keypoints, g)
        result = ransac_pnp(cam, model, image, init, ransac)
    else:
        init = depth_init(cam, keypoints, g)
        result = refine_lm(cam, model, image, init)
    return ConeMeasurement(bbox=bbox, keypoints=keypoints, result=result)


def skip_record(index: int, position: Point3, exc: ConeToolsError) -> SkippedCone:
    reason = type(exc).__name__
    logger.warning("cone %d at z=%.2f skipped: %s: %s", index, position.z, reason, exc)
    return SkippedCone(index=index, reason=reason, detail=str(exc), true_position=position)


def estimate_frame(
    scene: ScenePlan,
    predictor: KeypointPredictor | None,
    cfg: RunConfig,
) -> FrameEstimate:
    """Run the mono pipeline on every cone of a scene.

    Cone ``i`` draws its randomness from ``(scene.seed, i)``. Cones that
    fail any stage are listed in ``skipped``; nothing is fabricated.

    Raises:
        EmptyScene: If the scene has no cones.
    """
    if not scene.cones:
        raise EmptyScene(f"scene with seed {scene.seed} has no cones")
    observations, skipped = [], []
    for index, cone in enumerate(scene.cones):
        try:
            measured = measure_cone(
                scene.camera,
                cone.position,
                cone.geometry,
                predictor,
                cfg.noise,
                derive_rng(scene.seed, index),
                derive_seed(scene.seed, index, 1),
                ransac=cfg.ransac,
            )
        except ConeToolsError as exc:
            skipped.append(skip_record(index, cone.position, exc))
            continue
        result = measured.result
        observations.append(
            ConeObservation(
                index=index,
                position=result.position,
                color_class=cone.color_class,
                mean_reproj_error=result.mean_reproj_error,
                inlier_count=result.inlier_count,
                source=Source.MONO,
            )
        )
    frame = FrameEstimate(observations=observations, skipped=skipped)
    logger.info(
        "frame seed %d: %d/%d cones observed", scene.seed, len(observations), len(scene.cones)
    )
    return frame


__all__ = ["observe_keypoints", "measure_cone", "skip_record", "estimate_frame"]
