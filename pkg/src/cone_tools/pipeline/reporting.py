"""CSV and metadata emission for pipeline and experiment outputs."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

import pandas as pd
import yaml

from cone_tools.config import RunConfig, config_to_dict

from .experiments import ExperimentResult
from .models import ConeObservation, KeypointMode, SkippedCone

logger = logging.getLogger(__name__)

OBSERVATION_COLUMNS = [
    "index",
    "x",
    "y",
    "z",
    "color_class",
    "mean_reproj_error",
    "inlier_count",
    "source",
]
SKIPPED_COLUMNS = ["index", "reason", "detail", "true_x", "true_y", "true_z"]

CALIBRATION_NOTE = (
    "Synthetic-oracle run. Noise magnitudes are calibration knobs; absolute error "
    "levels are not a reproduction of field measurements."
)


def write_csv(table: pd.DataFrame, path: str | Path) -> Path:
    """Write ``table`` without index, with ``\\n`` line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, lineterminator="\n")
    logger.debug("wrote %d rows to %s", len(table), path)
    return path


def observations_table(observations: Sequence[ConeObservation]) -> pd.DataFrame:
    rows = [
        (
            o.index,
            o.position.x,
            o.position.y,
            o.position.z,
            o.color_class.value,
            o.mean_reproj_error,
            o.inlier_count,
            o.source.value,
        )
        for o in observations
    ]
    return pd.DataFrame(rows, columns=OBSERVATION_COLUMNS)


def skipped_table(skipped: Sequence[SkippedCone]) -> pd.DataFrame:
    rows = [
        (s.index, s.reason, s.detail, s.true_position.x, s.true_position.y, s.true_position.z)
        for s in skipped
    ]
    return pd.DataFrame(rows, columns=SKIPPED_COLUMNS)


def write_metadata(
    path: str | Path, name: str, cfg: RunConfig, keypoint_mode: KeypointMode
) -> Path:
    """Record what produced an output file next to it."""
    path = Path(path)
    meta = {
        "experiment": name,
        "seed": cfg.seed,
        "keypoint_mode": keypoint_mode.value,
        "note": CALIBRATION_NOTE,
        "config": config_to_dict(cfg),
    }
    path.write_text(yaml.safe_dump(meta, sort_keys=False), encoding="utf-8")
    return path


def write_experiment(
    result: ExperimentResult,
    out_dir: str | Path,
    cfg: RunConfig,
    keypoint_mode: KeypointMode,
) -> list[Path]:
    """Write ``<name>.csv``, one ``<name>_<extra>.csv`` per extra table,
    ``skipped.csv`` and ``<name>.meta.yaml`` into ``out_dir``."""
    out = Path(out_dir)
    written = [write_csv(result.table, out / f"{result.name}.csv")]
    for key, table in result.extra.items():
        written.append(write_csv(table, out / f"{result.name}_{key}.csv"))
    written.append(write_csv(skipped_table(result.skipped), out / "skipped.csv"))
    meta_path = out / f"{result.name}.meta.yaml"
    written.append(write_metadata(meta_path, result.name, cfg, keypoint_mode))
    logger.info(
        "%s: %d rows, %d skipped -> %s", result.name, len(result.table), len(result.skipped), out
    )
    return written


__all__ = [
    "OBSERVATION_COLUMNS",
    "SKIPPED_COLUMNS",
    "CALIBRATION_NOTE",
    "write_csv",
    "observations_table",
    "skipped_table",
    "write_metadata",
    "write_experiment",
]
