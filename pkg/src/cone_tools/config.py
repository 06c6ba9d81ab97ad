"""Run configuration: one YAML file with a section per subsystem.

Every model carries defaults for programmatic use, but a config *file*
must spell out every key; missing and unknown keys are both errors that
name the offending key path.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Self

import pydantic
import yaml
from pydantic import BaseModel, Field, model_validator

from cone_tools.cone.models import ConeGeometry
from cone_tools.core.exceptions import ConfigurationError
from cone_tools.core.models import FrozenModel
from cone_tools.geometry.models import CameraModel
from cone_tools.pnp.models import RansacConfig
from cone_tools.regressor.training import TrainConfig
from cone_tools.stereo.models import StereoConfig
from cone_tools.synthetic.models import NoiseConfig

logger = logging.getLogger(__name__)

DEFAULT_CAMERA = CameraModel(fx=600.0, fy=600.0, cx=800.0, cy=400.0, width=1600, height=800)


class ExperimentConfig(FrozenModel):
    """Scene ranges, dataset sizes and experiment sweep settings."""

    range_min: float = Field(default=4.0, gt=0)
    range_max: float = Field(default=15.0, gt=0)
    n_cones: int = Field(default=50, ge=1)
    train_samples: int = Field(default=2000, ge=1)
    test_samples: int = Field(default=400, ge=1)
    augment: bool = True
    sweep_min: float = Field(default=4.0, gt=0)
    sweep_max: float = Field(default=16.0, gt=0)
    sweep_step: float = Field(default=0.5, gt=0)
    cones_per_bin: int = Field(default=100, ge=1)
    bbox_levels: tuple[float, ...] = (0.01, 0.05, 0.10, 0.20)
    bbox_depths: tuple[float, ...] = (4.0, 6.0, 8.0, 10.0, 12.0, 15.0)
    bbox_trials: int = Field(default=100, ge=2)
    kp_sigma_px: float = Field(default=0.5, ge=0)
    kp_trials: int = Field(default=500, ge=2)
    stereo_trials: int = Field(default=200, ge=1)
    ground_y: float = 0.0

    @model_validator(mode="after")
    def _ordered_ranges(self) -> Self:
        if not self.range_min < self.range_max:
            raise ValueError(f"range_min={self.range_min} must be below range_max")
        if not self.sweep_min <= self.sweep_max:
            raise ValueError(f"sweep_min={self.sweep_min} must not exceed sweep_max")
        if any(not 0.0 <= level <= 0.5 for level in self.bbox_levels):
            raise ValueError("bbox_levels must lie within [0, 0.5]")
        return self


class RunConfig(FrozenModel):
    camera: CameraModel = DEFAULT_CAMERA
    cone: ConeGeometry = ConeGeometry()
    noise: NoiseConfig = NoiseConfig()
    train: TrainConfig = TrainConfig()
    ransac: RansacConfig = RansacConfig()
    stereo: StereoConfig = StereoConfig()
    experiment: ExperimentConfig = ExperimentConfig()
    seed: int = Field(default=0, ge=0)


def _check_keys(model: type[BaseModel], data: Any, prefix: str) -> None:
    if not isinstance(data, dict):
        raise ConfigurationError(
            f"expected a mapping, got {type(data).__name__}", prefix.rstrip(".") or None
        )
    for key in data:
        if key not in model.model_fields:
            raise ConfigurationError(f"unknown key {key!r}", f"{prefix}{key}")
    for name, field in model.model_fields.items():
        path = f"{prefix}{name}"
        if name not in data:
            raise ConfigurationError("missing key", path)
        annotation = field.annotation
        if isinstance(annotation, type) and issubclass(annotation, BaseModel):
            _check_keys(annotation, data[name], f"{path}.")


def parse_config(data: Any) -> RunConfig:
    """Validate a complete config mapping.

    Raises:
        ConfigurationError: On a missing, unknown or invalid key.
    """
    _check_keys(RunConfig, data, "")
    try:
        return RunConfig.model_validate(data)
    except pydantic.ValidationError as exc:
        error = exc.errors()[0]
        path = ".".join(str(part) for part in error["loc"])
        raise ConfigurationError(error["msg"], path or None) from exc


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a YAML config file.

    Raises:
        ConfigurationError: If the file is unreadable, not YAML, or does not
            describe a complete, valid configuration.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"invalid YAML in {path}: {exc}") from exc
    cfg = parse_config(data)
    logger.debug("loaded config from %s", path)
    return cfg


def config_to_dict(cfg: RunConfig) -> dict[str, Any]:
    return cfg.model_dump(mode="json")


def dump_config(cfg: RunConfig, path: str | Path) -> None:
    """Write a complete config file that :func:`load_config` reads back unchanged."""
    text = yaml.safe_dump(config_to_dict(cfg), sort_keys=False, default_flow_style=None)
    Path(path).write_text(text, encoding="utf-8")


__all__ = [
    "DEFAULT_CAMERA",
    "ExperimentConfig",
    "RunConfig",
    "parse_config",
    "load_config",
    "dump_config",
    "config_to_dict",
]
