"""Seeded placement of cones inside the camera frustum."""

from __future__ import annotations

import logging

import numpy as np

from cone_tools.cone.models import ColorClass, ConeGeometry
from cone_tools.core.exceptions import InfeasibleFrustum, ValidationError
from cone_tools.geometry.models import CameraModel, Point3

from .models import PlacedCone, ScenePlan

logger = logging.getLogger(__name__)

DEFAULT_FOV_MARGIN = 0.02


def lateral_extent(
    cam: CameraModel,
    g: ConeGeometry,
    z: float,
    *,
    fov_margin: float = DEFAULT_FOV_MARGIN,
) -> tuple[float, float]:
    """Base-center x range at depth ``z`` that keeps both base corners on screen.

    ``fov_margin`` is a fraction of the image width kept free on each side.
    The range is empty (``lo > hi``) when the cone cannot fit.
    """
    margin = fov_margin * cam.width
    lo = (margin - cam.cx) * z / cam.fx + g.base_halfwidth
    hi = (cam.width - margin - cam.cx) * z / cam.fx - g.base_halfwidth
    return lo, hi


def _vertically_visible(cam: CameraModel, g: ConeGeometry, z: float, ground_y: float) -> bool:
    apex_v = cam.cy + cam.fy * (ground_y - g.height) / z
    base_v = cam.cy + cam.fy * ground_y / z
    return apex_v >= 0.0 and base_v < cam.height


def generate_scene(
    range_min: float,
    range_max: float,
    n_cones: int,
    cam: CameraModel,
    g: ConeGeometry,
    seed: int,
    *,
    ground_y: float = 0.0,
    fov_margin: float = DEFAULT_FOV_MARGIN,
    random_colors: bool = True,
) -> ScenePlan:
    """Place ``n_cones`` upright cones with uniform depth and in-frustum x.

    Every cone stands on the plane ``y = ground_y`` of the camera frame.
    Output is a pure function of the arguments.

    Raises:
        ValidationError: On an empty or inverted depth range or ``n_cones < 1``.
        InfeasibleFrustum: If no lateral placement fits at ``range_min``.
    """
    if not 0.0 < range_min < range_max:
        raise ValidationError(f"need 0 < range_min < range_max, got {range_min}, {range_max}")
    if n_cones < 1:
        raise ValidationError(f"n_cones must be >= 1, got {n_cones}")
    lo, hi = lateral_extent(cam, g, range_min, fov_margin=fov_margin)
    if lo > hi:
        raise InfeasibleFrustum(f"no lateral room for the cone at z={range_min}")
    if not _vertically_visible(cam, g, range_min, ground_y):
        raise InfeasibleFrustum(f"cone leaves the frame vertically at z={range_min}")

    rng = np.random.default_rng(seed)
    colors = list(ColorClass)
    cones = []
    for _ in range(n_cones):
        z = float(rng.uniform(range_min, range_max))
        lo, hi = lateral_extent(cam, g, z, fov_margin=fov_margin)
        x = float(rng.uniform(lo, hi))
        color = colors[int(rng.integers(len(colors)))] if random_colors else g.color_class
        cones.append(
            PlacedCone(geometry=g.with_color(color), position=Point3(x=x, y=ground_y, z=z))
        )
    logger.debug("generated %d cones (seed %d)", n_cones, seed)
    return ScenePlan(
        camera=cam, cones=tuple(cones), seed=seed, range_min=range_min, range_max=range_max
    )


__all__ = ["DEFAULT_FOV_MARGIN", "lateral_extent", "generate_scene"]
