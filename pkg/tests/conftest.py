from __future__ import annotations

import os

import numpy as np
import pytest

from cone_tools.cli import TEST_SALT, TRAIN_SALT
from cone_tools.cone.models import ConeGeometry
from cone_tools.config import RunConfig
from cone_tools.core.resilience import derive_seed
from cone_tools.geometry.models import CameraModel
from cone_tools.regressor.network import RegressorNet
from cone_tools.regressor.training import train
from cone_tools.synthetic.dataset import generate_dataset
from cone_tools.synthetic.models import NoiseConfig, PatchSample

SLOW_ENV_VAR = "CONE_TOOLS_SLOW_TESTS"
SLOW_SKIP_REASON = "Slow test skipped. Set CONE_TOOLS_SLOW_TESTS=1 or pass --run-slow to enable."

# Training length of the full-size regressor runs.
FULL_RUN_EPOCHS = 60


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run training and large Monte Carlo tests",
    )


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line(
        "markers",
        "slow: marks tests that train a network or run large Monte Carlo sweeps",
    )


def _slow_enabled(config: pytest.Config) -> bool:
    return bool(config.getoption("--run-slow")) or bool(os.getenv(SLOW_ENV_VAR))


@pytest.fixture
def require_slow(request: pytest.FixtureRequest) -> None:
    if not _slow_enabled(request.config):
        pytest.skip(SLOW_SKIP_REASON)


@pytest.fixture(scope="session")
def slow_session(request: pytest.FixtureRequest) -> None:
    """Session-wide variant of ``require_slow`` for expensive shared fixtures."""
    if not _slow_enabled(request.config):
        pytest.skip(SLOW_SKIP_REASON)


@pytest.fixture(scope="session")
def full_datasets(slow_session: None) -> tuple[list[PatchSample], list[PatchSample]]:
    """Train and test sets as ``cone-tools synth`` renders them from the defaults."""
    cfg = RunConfig()
    exp = cfg.experiment
    common = {
        "noise": cfg.noise,
        "range_min": exp.range_min,
        "range_max": exp.range_max,
        "ground_y": exp.ground_y,
    }
    train_set = generate_dataset(
        cfg.camera,
        cfg.cone,
        exp.train_samples,
        derive_seed(cfg.seed, TRAIN_SALT),
        augment=exp.augment,
        **common,
    )
    test_set = generate_dataset(
        cfg.camera, cfg.cone, exp.test_samples, derive_seed(cfg.seed, TEST_SALT), **common
    )
    return train_set, test_set


@pytest.fixture(scope="session")
def full_regressors(
    full_datasets: tuple[list[PatchSample], list[PatchSample]],
) -> dict[float, tuple[RegressorNet, list[float]]]:
    """Default networks trained for 60 epochs with and without the cross-ratio term."""
    train_set, _ = full_datasets
    base = RunConfig().train.model_copy(update={"epochs": FULL_RUN_EPOCHS})
    return {
        gamma: train(train_set, base.model_copy(update={"gamma": gamma})) for gamma in (0.0, 1.0)
    }


@pytest.fixture
def camera() -> CameraModel:
    return CameraModel(fx=600.0, fy=600.0, cx=800.0, cy=400.0, width=1600, height=800)


@pytest.fixture
def cone() -> ConeGeometry:
    return ConeGeometry()


@pytest.fixture
def clean_noise() -> NoiseConfig:
    return NoiseConfig.clean()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
