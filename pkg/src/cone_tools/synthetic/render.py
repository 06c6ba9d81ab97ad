"""Procedural cone patch rasterizer with exact keypoint annotations.

The patch is rasterized directly in patch coordinates: each output pixel
center is mapped back to the source crop (through the inverse of the
optional geometric augmentation) and classified against the projected cone
silhouette. The stripe interfaces are the straight lines through the
projected stripe keypoints, so band edges and annotations agree up to
pixel quantization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from cone_tools.cone.keypoints import keypoints_in_camera
from cone_tools.cone.models import ColorClass, ConeGeometry, KeypointFrame, KeypointSet
from cone_tools.core.exceptions import NonPositiveDepth, OutOfFrame, TooSmall
from cone_tools.geometry.models import CameraModel, Point3
from cone_tools.geometry.projection import project_points

from .detection import simulate_detection
from .models import BBox, NoiseConfig, PatchSample

logger = logging.getLogger(__name__)

# (outer band, middle stripe) RGB per color class.
BAND_COLORS: dict[ColorClass, tuple[tuple[float, float, float], tuple[float, float, float]]] = {
    ColorClass.YELLOW: ((0.95, 0.82, 0.10), (0.08, 0.08, 0.08)),
    ColorClass.BLUE: ((0.10, 0.28, 0.85), (0.95, 0.95, 0.95)),
    ColorClass.ORANGE: ((1.00, 0.50, 0.05), (0.95, 0.95, 0.95)),
}

MAX_ROTATION_DEG = 10.0
SCALE_RANGE = (0.9, 1.1)
MAX_SHIFT_PX = 4.0


@dataclass(frozen=True)
class Augmentation:
    """Similarity transform about the patch center, applied to pixels and keypoints."""

    angle: float
    scale: float
    shift: tuple[float, float]

    @classmethod
    def draw(cls, rng: np.random.Generator) -> Augmentation:
        angle = np.deg2rad(rng.uniform(-MAX_ROTATION_DEG, MAX_ROTATION_DEG))
        scale = rng.uniform(*SCALE_RANGE)
        dx, dy = rng.uniform(-MAX_SHIFT_PX, MAX_SHIFT_PX, size=2)
        return cls(angle=float(angle), scale=float(scale), shift=(float(dx), float(dy)))

    def _matrix(self) -> NDArray[np.float64]:
        c, s = np.cos(self.angle), np.sin(self.angle)
        return self.scale * np.array([[c, -s], [s, c]])

    def apply(self, points: NDArray[np.float64], center: float) -> NDArray[np.float64]:
        """Source-crop coordinates -> augmented patch coordinates."""
        return (points - center) @ self._matrix().T + center + np.asarray(self.shift)

    def invert(self, points: NDArray[np.float64], center: float) -> NDArray[np.float64]:
        """Augmented patch coordinates -> source-crop coordinates."""
        inverse = np.linalg.inv(self._matrix())
        return (points - center - np.asarray(self.shift)) @ inverse.T + center


def _edge(a: NDArray[np.float64], b: NDArray[np.float64], p: NDArray[np.float64]) -> NDArray:
    """Signed area of ``(a, b, p)``; its sign tells the side of line ``ab``."""
    return (b[0] - a[0]) * (p[..., 1] - a[1]) - (b[1] - a[1]) * (p[..., 0] - a[0])


def cone_bands(points: NDArray[np.float64], kps: NDArray[np.float64]) -> NDArray[np.int8]:
    """Label each point: -1 outside the cone, 0 top band, 1 stripe, 2 bottom band."""
    apex, left_base, right_base = kps[0], kps[3], kps[6]
    e1 = _edge(apex, left_base, points)
    e2 = _edge(left_base, right_base, points)
    e3 = _edge(right_base, apex, points)
    inside = ((e1 >= 0) & (e2 >= 0) & (e3 >= 0)) | ((e1 <= 0) & (e2 <= 0) & (e3 <= 0))

    upper_ref = np.sign(_edge(kps[1], kps[4], apex))
    above_upper = np.sign(_edge(kps[1], kps[4], points)) == upper_ref
    lower_ref = np.sign(_edge(kps[2], kps[5], left_base))
    below_lower = np.sign(_edge(kps[2], kps[5], points)) == lower_ref

    labels = np.full(points.shape[:-1], 1, dtype=np.int8)
    labels[above_upper] = 0
    labels[below_lower] = 2
    labels[~inside] = -1
    return labels


def _background(rng: np.random.Generator, src: NDArray[np.float64], size: int) -> NDArray:
    top, bottom = rng.uniform(0.2, 0.8, size=(2, 3))
    t = np.clip(src[..., 1] / size, 0.0, 1.0)[..., None]
    rgb = top * (1.0 - t) + bottom * t
    for _ in range(int(rng.integers(2, 6))):
        x0, y0 = rng.uniform(-0.2 * size, size, size=2)
        w, h = rng.uniform(0.05 * size, 0.4 * size, size=2)
        color = rng.uniform(0.0, 1.0, size=3)
        block = (
            (src[..., 0] >= x0)
            & (src[..., 0] < x0 + w)
            & (src[..., 1] >= y0)
            & (src[..., 1] < y0 + h)
        )
        rgb[block] = color
    return rgb


def jitter_colors(
    rgb: NDArray,
    rng: np.random.Generator,
    brightness: float,
    saturation: float,
    contrast: float,
) -> NDArray:
    """Random saturation, contrast and brightness scaling of ``(..., H, W, 3)`` images.

    Three factors are drawn per call whether or not the jitter is zero, so
    the generator stream does not depend on the settings.
    """
    b = rng.uniform(1.0 - brightness, 1.0 + brightness)
    s = rng.uniform(1.0 - saturation, 1.0 + saturation)
    c = rng.uniform(1.0 - contrast, 1.0 + contrast)
    gray = rgb.mean(axis=-1, keepdims=True)
    out = gray + s * (rgb - gray)
    mean = out.mean(axis=(-3, -2, -1), keepdims=True)
    out = mean + c * (out - mean)
    return np.clip(out * b, 0.0, 1.0)


def project_cone(
    cam: CameraModel, cone_position: Point3, g: ConeGeometry, min_apparent_height_px: float
) -> NDArray[np.float64]:
    """Exact image-frame keypoints ``(7, 2)`` of an upright cone.

    Raises:
        OutOfFrame: If the cone is behind the camera.
        TooSmall: If the apex-to-base height is below ``min_apparent_height_px``.
    """
    try:
        image_kps = project_points(cam, keypoints_in_camera(g, cone_position.as_array()))
    except NonPositiveDepth as exc:
        raise OutOfFrame(f"cone at z={cone_position.z:.3f} is behind the camera") from exc
    apparent = 0.5 * (image_kps[3, 1] + image_kps[6, 1]) - image_kps[0, 1]
    if apparent < min_apparent_height_px:
        raise TooSmall(
            f"apparent height {apparent:.2f} px below {min_apparent_height_px} px "
            f"at z={cone_position.z:.2f}"
        )
    return image_kps


def render_patch(
    cam: CameraModel,
    cone_position: Point3,
    g: ConeGeometry,
    photometric_seed: int,
    *,
    bbox: BBox | None = None,
    noise: NoiseConfig | None = None,
    augment: bool = False,
) -> PatchSample:
    """Rasterize one cone crop and annotate its keypoints in the patch frame.

    The crop is ``bbox`` (a simulated detection with ``noise.bbox_margin_frac``
    when omitted), resampled to ``noise.patch_size`` squared. Crop pixels that
    fall outside the sensor are black. All randomness (background clutter,
    photometric jitter, pixel noise, augmentation) comes from
    ``photometric_seed``.

    Raises:
        TooSmall: If the apparent cone height is below
            ``noise.min_apparent_height_px``.
        OutOfFrame: If the cone is behind the camera or misses the image.
    """
    noise = noise or NoiseConfig()
    size = noise.patch_size
    image_kps = project_cone(cam, cone_position, g, noise.min_apparent_height_px)
    if bbox is None:
        bbox = simulate_detection(cam, cone_position, g, noise.bbox_margin_frac)

    rng = np.random.default_rng(photometric_seed)
    center = 0.5 * size
    crop_kps = bbox.to_patch(image_kps, size)
    augmentation = Augmentation.draw(rng) if augment else None

    axis = np.arange(size, dtype=np.float64) + 0.5
    cols, rows = np.meshgrid(axis, axis)
    grid = np.stack((cols, rows), axis=-1)
    src = augmentation.invert(grid, center) if augmentation else grid

    rgb = _background(rng, src, size)
    outer, stripe = (np.asarray(c) for c in BAND_COLORS[g.color_class])
    labels = cone_bands(src, crop_kps)
    rgb[(labels == 0) | (labels == 2)] = outer
    rgb[labels == 1] = stripe

    rgb = jitter_colors(
        rgb, rng, noise.brightness_jitter, noise.saturation_jitter, noise.contrast_jitter
    )
    sigma = rng.uniform(0.0, noise.pixel_noise_max)
    if sigma > 0.0:
        rgb = np.clip(rgb + rng.normal(0.0, sigma, size=rgb.shape), 0.0, 1.0)

    sensor = bbox.to_image(src.reshape(-1, 2), size).reshape(size, size, 2)
    off_sensor = (
        (sensor[..., 0] < 0)
        | (sensor[..., 0] >= cam.width)
        | (sensor[..., 1] < 0)
        | (sensor[..., 1] >= cam.height)
    )
    rgb[off_sensor] = 0.0

    patch_kps = augmentation.apply(crop_kps, center) if augmentation else crop_kps
    return PatchSample(
        patch=rgb.astype(np.float32),
        keypoints=KeypointSet.from_array(patch_kps, KeypointFrame.PATCH),
        bbox=bbox,
        position=cone_position,
        color_class=g.color_class,
    )


__all__ = [
    "BAND_COLORS",
    "Augmentation",
    "cone_bands",
    "jitter_colors",
    "project_cone",
    "render_patch",
]
