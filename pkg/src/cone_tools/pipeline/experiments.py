"""Quantitative experiments on the synthetic oracle.

Every trial draws from its own generator derived from the run seed, an
experiment salt and the trial coordinates, so rows do not depend on the
order trials run in. Rows are emitted sorted by bin, then trial.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from cone_tools.cone.keypoints import canonical_keypoint_array
from cone_tools.cone.models import ColorClass, ConeGeometry, KeypointFrame, KeypointSet
from cone_tools.config import RunConfig
from cone_tools.core.exceptions import ConeToolsError, GeometryError
from cone_tools.core.resilience import derive_rng, derive_seed
from cone_tools.geometry.fitting import fit_quadratic
from cone_tools.geometry.models import Point3
from cone_tools.pnp.solver import depth_init, refine_lm
from cone_tools.regressor.predictors import KeypointPredictor
from cone_tools.stereo.models import StereoRig
from cone_tools.stereo.propagation import propagate_bbox, stereo_refine
from cone_tools.synthetic.detection import perturb_bbox, simulate_detection
from cone_tools.synthetic.render import project_cone
from cone_tools.synthetic.scene import lateral_extent

from .estimate import measure_cone, observe_keypoints, skip_record
from .models import SkippedCone

logger = logging.getLogger(__name__)

DEPTH_SALT = 101
BBOX_SALT = 202
KP_SALT = 303
STEREO_SALT = 404

KP_PLACEMENTS = 12

DEPTH_COLUMNS = ["true_z", "est_z", "abs_error", "rel_error"]
FIT_COLUMNS = ["a", "b", "c"]
BBOX_COLUMNS = ["level", "true_z", "depth_variance", "n_valid"]
KP_COLUMNS = [
    "cone_id",
    "true_z",
    "var_x_px2",
    "var_y_px2",
    "depth_var_xnoise",
    "depth_var_ynoise",
]
STEREO_COLUMNS = [
    "trial",
    "true_z",
    "mono_z",
    "stereo_z",
    "mono_abs_error",
    "stereo_abs_error",
    "in_stereo_range",
]


@dataclass
class ExperimentResult:
    """Table of one experiment plus cones that produced no estimate."""

    name: str
    table: pd.DataFrame
    skipped: list[SkippedCone] = field(default_factory=list)
    extra: dict[str, pd.DataFrame] = field(default_factory=dict)


def _random_cone(
    cfg: RunConfig, rng: np.random.Generator, z: float
) -> tuple[Point3, ConeGeometry]:
    lo, hi = lateral_extent(cfg.camera, cfg.cone, z)
    x = float(rng.uniform(lo, hi)) if lo <= hi else 0.0
    colors = list(ColorClass)
    geometry = cfg.cone.with_color(colors[int(rng.integers(len(colors)))])
    return Point3(x=x, y=cfg.experiment.ground_y, z=z), geometry


def depth_bins(cfg: RunConfig) -> np.ndarray:
    exp = cfg.experiment
    count = int(np.floor((exp.sweep_max - exp.sweep_min) / exp.sweep_step + 1e-9)) + 1
    return exp.sweep_min + exp.sweep_step * np.arange(count)


def exp_depth_accuracy(
    cfg: RunConfig, predictor: KeypointPredictor | None = None
) -> ExperimentResult:
    """Depth error against true depth over a sweep of depth bins.

    Each bin holds ``cones_per_bin`` cones at exactly that depth with a
    random lateral offset and color. The quadratic through the per-bin mean
    absolute error is returned as the ``fit`` extra table.
    """
    rows, skipped = [], []
    counter = 0
    for bin_index, z in enumerate(depth_bins(cfg)):
        for trial in range(cfg.experiment.cones_per_bin):
            rng = derive_rng(cfg.seed, DEPTH_SALT, bin_index, trial)
            position, geometry = _random_cone(cfg, rng, float(z))
            try:
                measured = measure_cone(
                    cfg.camera,
                    position,
                    geometry,
                    predictor,
                    cfg.noise,
                    rng,
                    derive_seed(cfg.seed, DEPTH_SALT, bin_index, trial, 1),
                    ransac=cfg.ransac,
                )
            except ConeToolsError as exc:
                skipped.append(skip_record(counter, position, exc))
            else:
                est_z = measured.result.position.z
                error = abs(est_z - z)
                rows.append((float(z), est_z, error, error / z))
            counter += 1
        logger.info("depth bin %.2f m done", z)

    table = pd.DataFrame(rows, columns=DEPTH_COLUMNS)
    extra = {}
    means = table.groupby("true_z", sort=True)["abs_error"].mean()
    try:
        coeffs = fit_quadratic(means.index.to_numpy(), means.to_numpy())
    except GeometryError as exc:
        logger.warning("no quadratic fit of depth error: %s", exc)
    else:
        extra["fit"] = pd.DataFrame([coeffs], columns=FIT_COLUMNS)
    return ExperimentResult("exp_depth", table, skipped, extra)


def exp_bbox_perturbation(cfg: RunConfig, predictor: KeypointPredictor) -> ExperimentResult:
    """Depth variance caused by perturbing the detection box edges.

    The same cone (centered, at each configured depth) is rendered with a
    fixed photometric seed; only the box changes between trials, and the
    trial draws are shared across levels. Keypoint noise is disabled.
    """
    exp = cfg.experiment
    noise = cfg.noise.model_copy(update={"keypoint_sigma_px": 0.0, "bbox_perturbation": 0.0})
    rows, skipped = [], []
    counter = 0
    for level in exp.bbox_levels:
        for depth_index, z in enumerate(exp.bbox_depths):
            position = Point3(x=0.0, y=exp.ground_y, z=z)
            photometric_seed = derive_seed(cfg.seed, BBOX_SALT, depth_index)
            margin = noise.bbox_margin_frac
            estimates = []
            for trial in range(exp.bbox_trials):
                rng = derive_rng(cfg.seed, BBOX_SALT, depth_index, trial)
                try:
                    base = simulate_detection(cfg.camera, position, cfg.cone, margin)
                    bbox = perturb_bbox(base, level, rng)
                    measured = measure_cone(
                        cfg.camera,
                        position,
                        cfg.cone,
                        predictor,
                        noise,
                        rng,
                        photometric_seed,
                        ransac=cfg.ransac,
                        bbox=bbox,
                    )
                except ConeToolsError as exc:
                    skipped.append(skip_record(counter, position, exc))
                else:
                    estimates.append(measured.result.position.z)
                counter += 1
            variance = float(np.var(estimates)) if len(estimates) >= 2 else float("nan")
            rows.append((float(level), float(z), variance, len(estimates)))
        logger.info("bbox level %.2f done", level)
    table = pd.DataFrame(rows, columns=BBOX_COLUMNS)
    table = table.sort_values(["level", "true_z"], kind="stable").reset_index(drop=True)
    return ExperimentResult("exp_bbox", table, skipped)


def _solve_depth(cfg: RunConfig, image: np.ndarray) -> float:
    keypoints = KeypointSet.from_array(image, KeypointFrame.IMAGE)
    init = depth_init(cfg.camera, keypoints, cfg.cone)
    result = refine_lm(cfg.camera, canonical_keypoint_array(cfg.cone), image, init)
    return result.position.z


def exp_kp_variance(cfg: RunConfig, sigma_px: float | None = None) -> ExperimentResult:
    """Depth variance from noise injected into keypoint x only versus y only.

    Twelve placements spread over the experiment range; every trial uses
    one standard-normal draw per keypoint for both runs, scaled by
    ``sigma_px`` (``experiment.kp_sigma_px`` when omitted). Solves are plain
    Levenberg-Marquardt from the height-based seed.
    """
    exp = cfg.experiment
    sigma = exp.kp_sigma_px if sigma_px is None else sigma_px
    rows, skipped = [], []
    for cone_id, z in enumerate(np.linspace(exp.range_min, exp.range_max, KP_PLACEMENTS)):
        rng = derive_rng(cfg.seed, KP_SALT, cone_id)
        position, geometry = _random_cone(cfg, rng, float(z))
        try:
            exact = project_cone(cfg.camera, position, geometry, cfg.noise.min_apparent_height_px)
            depth_x, depth_y = [], []
            for _ in range(exp.kp_trials):
                draw = sigma * rng.standard_normal(len(exact))
                noisy_x = exact.copy()
                noisy_x[:, 0] += draw
                noisy_y = exact.copy()
                noisy_y[:, 1] += draw
                depth_x.append(_solve_depth(cfg, noisy_x))
                depth_y.append(_solve_depth(cfg, noisy_y))
        except ConeToolsError as exc:
            skipped.append(skip_record(cone_id, position, exc))
            continue
        variance = sigma * sigma
        rows.append(
            (cone_id, float(z), variance, variance, float(np.var(depth_x)), float(np.var(depth_y)))
        )
    return ExperimentResult("exp_kpvar", pd.DataFrame(rows, columns=KP_COLUMNS), skipped)


def stereo_eval(
    cfg: RunConfig, predictor: KeypointPredictor | None = None
) -> ExperimentResult:
    """Mono versus stereo depth error on identical cones.

    The mono box is propagated into the right image, the right view is
    observed through it, and the seven keypoint pairs are triangulated.
    Both estimates are reported; ``in_stereo_range`` flags the stereo
    rig's calibrated band. The two are not fused.
    """
    exp = cfg.experiment
    rig = StereoRig.from_baseline(cfg.camera, cfg.stereo.baseline)
    rows, skipped = [], []
    for trial in range(exp.stereo_trials):
        rng = derive_rng(cfg.seed, STEREO_SALT, trial)
        z = float(rng.uniform(exp.range_min, exp.range_max))
        position, geometry = _random_cone(cfg, rng, z)
        try:
            mono = measure_cone(
                cfg.camera,
                position,
                geometry,
                predictor,
                cfg.noise,
                rng,
                derive_seed(cfg.seed, STEREO_SALT, trial, 1),
                ransac=cfg.ransac,
            )
            bbox_right = propagate_bbox(rig, mono.result.position, mono.bbox, geometry)
            right_position = Point3.from_array(rig.left_to_right.apply(position.as_array()))
            _, right_keypoints = observe_keypoints(
                rig.right,
                right_position,
                geometry,
                predictor,
                cfg.noise,
                rng,
                derive_seed(cfg.seed, STEREO_SALT, trial, 2),
                bbox=bbox_right,
            )
            stereo = stereo_refine(rig, mono.keypoints, right_keypoints, geometry)
        except ConeToolsError as exc:
            skipped.append(skip_record(trial, position, exc))
            continue
        mono_z = mono.result.position.z
        rows.append(
            (
                trial,
                z,
                mono_z,
                stereo.z,
                abs(mono_z - z),
                abs(stereo.z - z),
                cfg.stereo.in_calibrated_range(z),
            )
        )
    return ExperimentResult("stereo_eval", pd.DataFrame(rows, columns=STEREO_COLUMNS), skipped)


__all__ = [
    "DEPTH_COLUMNS",
    "FIT_COLUMNS",
    "BBOX_COLUMNS",
    "KP_COLUMNS",
    "STEREO_COLUMNS",
    "KP_PLACEMENTS",
    "ExperimentResult",
    "depth_bins",
    "exp_depth_accuracy",
    "exp_bbox_perturbation",
    "exp_kp_variance",
    "stereo_eval",
]
