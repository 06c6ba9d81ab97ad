"""Exhaustive-subset consensus PnP.

With seven correspondences there are only C(7, 4) = 35 minimal subsets, so
every subset is tried in lexicographic order instead of sampling randomly.
Subsets whose model points are collinear (a single cone arm) leave the
rotation about that line free and are skipped.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from itertools import combinations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cone_tools.core.exceptions import GeometryError, NoConsensus, PnPError
from cone_tools.geometry.models import CameraModel, RigidPose

from .models import PnPResult, RansacConfig
from .solver import as_correspondences, refine_lm

logger = logging.getLogger(__name__)

# Relative size of the second singular value below which points count as collinear.
COLLINEAR_TOLERANCE = 1e-9


def _collinear(points: NDArray[np.float64]) -> bool:
    singular = np.linalg.svd(points - points.mean(axis=0), compute_uv=False)
    return bool(singular[1] <= COLLINEAR_TOLERANCE * singular[0])


def minimal_subsets(model_pts: ArrayLike, size: int) -> Iterator[tuple[int, ...]]:
    """Index subsets of ``size`` model points in lexicographic order, minus collinear ones."""
    model = np.asarray(model_pts, dtype=np.float64).reshape(-1, 3)
    for subset in combinations(range(len(model)), size):
        if _collinear(model[list(subset)]):
            logger.debug("subset %s is collinear, skipped", subset)
            continue
        yield subset


def ransac_pnp(
    cam: CameraModel,
    model_pts: ArrayLike,
    image_pts: ArrayLike,
    init: RigidPose,
    cfg: RansacConfig | None = None,
) -> PnPResult:
    """Fit every usable subset, keep the largest inlier set, re-fit on it.

    Inliers are points whose reprojection error under a subset's pose is
    below ``cfg.inlier_threshold``. Ties on inlier count go to the lower
    mean inlier residual, then to the earlier subset.

    Raises:
        NoConsensus: If the best subset gathers fewer than ``cfg.min_inliers``.
    """
    cfg = cfg or RansacConfig()
    model, image = as_correspondences(model_pts, image_pts)
    n = len(model)

    best_fit: PnPResult | None = None
    best_inliers: np.ndarray | None = None
    best_score: tuple[int, float] | None = None

    for subset in minimal_subsets(model, cfg.subset_size):
        mask = np.zeros(n, dtype=bool)
        mask[list(subset)] = True
        try:
            fit = refine_lm(cam, model, image, init, use_mask=mask)
        except (PnPError, GeometryError) as exc:
            logger.debug("subset %s rejected: %s", subset, exc)
            continue
        inliers = fit.per_point_residuals < cfg.inlier_threshold
        count = int(inliers.sum())
        spread = float(np.mean(fit.per_point_residuals[inliers])) if count else np.inf
        score = (count, -spread)
        if best_score is None or score > best_score:
            best_fit, best_inliers, best_score = fit, inliers, score

    count = best_score[0] if best_score is not None else 0
    if best_fit is None or best_inliers is None or count < cfg.min_inliers:
        raise NoConsensus(
            f"best subset has {count} inliers, need {cfg.min_inliers}", inlier_count=count
        )

    result = refine_lm(cam, model, image, best_fit.pose, use_mask=best_inliers)
    logger.debug("consensus on %d/%d points", count, n)
    return result


__all__ = ["COLLINEAR_TOLERANCE", "minimal_subsets", "ransac_pnp"]
