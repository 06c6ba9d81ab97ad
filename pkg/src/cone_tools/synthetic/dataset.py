"""Patch dataset generation and the "CPDS" binary file format.

File layout (little-endian)::

    magic "CPDS" | version u32 | count u64 | patch size u32
    per sample: P*P*3 float32 patch | 14 float64 keypoints
                | 3 float64 position | u8 color class | 4 float64 bbox
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from cone_tools.cone.models import ColorClass, ConeGeometry, KeypointFrame, KeypointSet
from cone_tools.core.binary import (
    ensure_eof,
    pack_u8,
    pack_u32,
    pack_u64,
    read_exact,
    read_header,
    read_u8,
    read_u32,
    read_u64,
    write_header,
)
from cone_tools.core.exceptions import (
    CorruptFile,
    EmptyDataset,
    OutOfFrame,
    TooSmall,
    ValidationError,
)
from cone_tools.core.resilience import derive_rng, derive_seed, resample
from cone_tools.geometry.models import CameraModel, Point3

from .detection import perturb_bbox, simulate_detection
from .models import BBox, NoiseConfig, PatchSample
from .render import render_patch
from .scene import lateral_extent

logger = logging.getLogger(__name__)

MAGIC = b"CPDS"
VERSION = 1

# Share of generated samples whose cone is placed partly off the sensor.
TRUNCATED_FRACTION = 0.1

_F4 = np.dtype("<f4")
_F8 = np.dtype("<f8")


def generate_dataset(
    cam: CameraModel,
    g: ConeGeometry,
    n: int,
    seed: int,
    *,
    noise: NoiseConfig | None = None,
    range_min: float = 4.0,
    range_max: float = 15.0,
    ground_y: float = 0.0,
    augment: bool = False,
) -> list[PatchSample]:
    """Render ``n`` labelled patches of randomly placed cones.

    Sample ``i`` depends only on ``(seed, i)``. Colors are uniform over the
    classes; detections are jittered by ``noise.detector_jitter``, and about
    one sample in ten straddles the left or right image border.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    noise = noise or NoiseConfig()
    colors = list(ColorClass)
    samples = []
    for index in range(n):
        rng = derive_rng(seed, index)

        def draw(rng: np.random.Generator = rng, index: int = index) -> PatchSample:
            z = float(rng.uniform(range_min, range_max))
            lo, hi = lateral_extent(cam, g, z, fov_margin=0.0)
            if rng.uniform() < TRUNCATED_FRACTION:
                # Base center within one half-width of a border.
                edge = hi if rng.uniform() < 0.5 else lo
                x = float(edge + np.sign(edge) * rng.uniform(0.0, g.base_halfwidth))
            else:
                x = float(rng.uniform(lo, hi))
            cone = g.with_color(colors[int(rng.integers(len(colors)))])
            position = Point3(x=x, y=ground_y, z=z)
            bbox = simulate_detection(cam, position, cone, noise.bbox_margin_frac)
            bbox = perturb_bbox(bbox, noise.detector_jitter, rng)
            return render_patch(
                cam,
                position,
                cone,
                derive_seed(seed, index, 1),
                bbox=bbox,
                noise=noise,
                augment=augment,
            )

        samples.append(resample(draw, TooSmall, OutOfFrame))
    logger.info("rendered %d patches (seed %d, augment=%s)", n, seed, augment)
    return samples


def write_dataset(path: str | Path, samples: Sequence[PatchSample]) -> None:
    """Serialize samples to ``path``.

    Raises:
        EmptyDataset: If ``samples`` is empty; no file is written.
        ValidationError: If patch sizes differ between samples.
    """
    if not samples:
        raise EmptyDataset("refusing to write an empty dataset")
    size = samples[0].patch_size
    for index, sample in enumerate(samples):
        if sample.patch_size != size:
            raise ValidationError(f"sample {index} has patch size {sample.patch_size}, not {size}")

    path = Path(path)
    with path.open("wb") as stream:
        write_header(stream, MAGIC, VERSION)
        stream.write(pack_u64(len(samples)))
        stream.write(pack_u32(size))
        for sample in samples:
            stream.write(sample.patch.astype(_F4).tobytes())
            stream.write(sample.keypoints.as_vector().astype(_F8).tobytes())
            stream.write(sample.position.as_array().astype(_F8).tobytes())
            stream.write(pack_u8(sample.color_class.code))
            box = sample.bbox
            stream.write(np.array([box.x, box.y, box.w, box.h], dtype=_F8).tobytes())
    logger.debug("wrote %d samples to %s", len(samples), path)


def read_dataset(path: str | Path) -> list[PatchSample]:
    """Load a dataset written by :func:`write_dataset`.

    Raises:
        CorruptFile: On bad magic, truncation, trailing bytes or invalid records.
        VersionMismatch: On an unknown format version.
    """
    path = Path(path)
    with path.open("rb") as stream:
        read_header(stream, MAGIC, VERSION, source=path)
        count = read_u64(stream, source=path)
        size = read_u32(stream, source=path)
        if count == 0 or size == 0:
            raise CorruptFile(f"empty dataset header (count={count}, size={size})", source=path)
        patch_bytes = size * size * 3 * _F4.itemsize
        samples = []
        for _ in range(count):
            patch = np.frombuffer(read_exact(stream, patch_bytes, path), dtype=_F4)
            keypoints = np.frombuffer(read_exact(stream, 14 * _F8.itemsize, path), dtype=_F8)
            position = np.frombuffer(read_exact(stream, 3 * _F8.itemsize, path), dtype=_F8)
            code = read_u8(stream, source=path)
            box = np.frombuffer(read_exact(stream, 4 * _F8.itemsize, path), dtype=_F8)
            try:
                samples.append(
                    PatchSample(
                        patch=patch.reshape(size, size, 3).astype(np.float32),
                        keypoints=KeypointSet.from_array(keypoints, KeypointFrame.PATCH),
                        bbox=BBox(x=box[0], y=box[1], w=box[2], h=box[3]),
                        position=Point3.from_array(position),
                        color_class=ColorClass.from_code(code),
                    )
                )
            except (ValueError, IndexError) as exc:
                raise CorruptFile(f"invalid sample record: {exc}", source=path) from exc
        ensure_eof(stream, source=path)
    logger.debug("read %d samples from %s", len(samples), path)
    return samples


__all__ = ["MAGIC", "VERSION", "generate_dataset", "write_dataset", "read_dataset"]
