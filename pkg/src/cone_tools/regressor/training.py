"""Seeded SGD training and evaluation of the keypoint regressor."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
import torch
from numpy.typing import NDArray
from pydantic import Field

from cone_tools.cone.models import LEFT_ARM, MODEL_CROSS_RATIO, NUM_KEYPOINTS, RIGHT_ARM
from cone_tools.core.exceptions import DivergedLoss, EmptyDataset, ShapeMismatch, ValidationError
from cone_tools.core.models import FrozenModel, RecordModel
from cone_tools.synthetic.models import PatchSample
from cone_tools.synthetic.render import jitter_colors

from .loss import arm_cross_ratios, batch_keypoint_loss, keypoint_loss_tensor
from .network import DEFAULT_CHANNELS, RegressorNet, default_layer_specs, to_tensor
from .predictors import KeypointPredictor

logger = logging.getLogger(__name__)

Dataset = Sequence[PatchSample]


class TrainConfig(FrozenModel):
    """Optimizer, schedule and architecture settings."""

    learning_rate: float = Field(default=1e-4, gt=0)
    momentum: float = Field(default=0.9, ge=0, lt=1)
    batch_size: int = Field(default=128, ge=1)
    epochs: int = Field(default=250, ge=1)
    lr_decay_epochs: tuple[int, ...] = (75, 100)
    lr_decay_factor: float = Field(default=0.1, gt=0)
    gamma: float = Field(default=1.0, ge=0)
    seed: int = 0
    channels: tuple[int, ...] = Field(default=DEFAULT_CHANNELS, min_length=1)
    normalization: bool = True
    input_size: int = Field(default=80, ge=8)
    init_output_bias_to_mean: bool = True
    color_jitter: float = Field(default=0.0, ge=0, lt=1)


class RegressorMetrics(RecordModel):
    """Dataset-level regression quality."""

    count: int
    mean_loss: float
    per_keypoint_rms: tuple[float, ...]
    mean_cr_error_left: float
    mean_cr_error_right: float

    @property
    def rms(self) -> float:
        return float(np.sqrt(np.mean(np.square(self.per_keypoint_rms))))


def stack_dataset(
    dataset: Dataset, input_size: int | None = None
) -> tuple[NDArray[np.float32], NDArray[np.float64]]:
    """Patches ``(N, P, P, 3)`` and targets ``(N, 14)`` of a dataset.

    Raises:
        EmptyDataset: If the dataset is empty.
        ShapeMismatch: If a patch does not have side ``input_size``.
    """
    if not dataset:
        raise EmptyDataset("dataset has no samples")
    size = input_size or dataset[0].patch_size
    for index, sample in enumerate(dataset):
        if sample.patch.shape != (size, size, 3):
            raise ShapeMismatch(f"sample {index} patch {sample.patch.shape}, expected side {size}")
    patches = np.stack([s.patch for s in dataset]).astype(np.float32)
    targets = np.stack([s.keypoints.as_vector() for s in dataset])
    return patches, targets


def dataset_loss(
    predictor: KeypointPredictor,
    patches: NDArray[np.float32],
    targets: NDArray[np.float64],
    gamma: float,
    cr3d: float = MODEL_CROSS_RATIO,
) -> float:
    """Mean per-sample loss of the predictor over a stacked dataset."""
    return float(np.mean(batch_keypoint_loss(predictor.predict(patches), targets, gamma, cr3d)))


def train(
    dataset: Dataset,
    cfg: TrainConfig | None = None,
    *,
    cr3d: float = MODEL_CROSS_RATIO,
) -> tuple[RegressorNet, list[float]]:
    """Fit a fresh network with SGD and momentum.

    Mini-batches are reshuffled every epoch from a generator seeded with
    ``cfg.seed``; the learning rate is multiplied by ``cfg.lr_decay_factor``
    after each epoch listed in ``cfg.lr_decay_epochs``. History entry ``e``
    is the mean training-set loss after epoch ``e`` in inference mode.

    Raises:
        EmptyDataset: If the dataset is empty.
        ShapeMismatch: If patch sizes differ from ``cfg.input_size``.
        DivergedLoss: If a batch loss becomes NaN or infinite.
    """
    cfg = cfg or TrainConfig()
    patches, targets = stack_dataset(dataset, cfg.input_size)
    count = len(patches)

    torch.manual_seed(cfg.seed)
    net = RegressorNet(
        default_layer_specs(cfg.channels),
        input_size=cfg.input_size,
        normalization=cfg.normalization,
        seed=cfg.seed,
    )
    if cfg.init_output_bias_to_mean:
        net.set_output_bias(targets.mean(axis=0))

    optimizer = torch.optim.SGD(net.parameters(), lr=cfg.learning_rate, momentum=cfg.momentum)
    scheduler = torch.optim.lr_scheduler.MultiStepLR(
        optimizer, milestones=list(cfg.lr_decay_epochs), gamma=cfg.lr_decay_factor
    )
    rng = np.random.default_rng(cfg.seed)
    target_tensor = torch.from_numpy(targets.astype(np.float32))
    history: list[float] = []

    logger.info(
        "training on %d samples for %d epochs (batch %d, lr %g)",
        count,
        cfg.epochs,
        cfg.batch_size,
        cfg.learning_rate,
    )
    for epoch in range(1, cfg.epochs + 1):
        net.train()
        order = rng.permutation(count)
        for batch_index, start in enumerate(range(0, count, cfg.batch_size)):
            indices = order[start : start + cfg.batch_size]
            batch = patches[indices]
            if cfg.color_jitter > 0.0:
                jitter = cfg.color_jitter
                batch = np.stack([jitter_colors(p, rng, jitter, jitter, jitter) for p in batch])
            prediction = net(to_tensor(batch.astype(np.float32)))
            try:
                loss = keypoint_loss_tensor(prediction, target_tensor[indices], cfg.gamma, cr3d)
            except ValidationError as exc:
                raise DivergedLoss(
                    f"non-finite prediction at epoch {epoch}, batch {batch_index}",
                    epoch=epoch,
                    batch=batch_index,
                ) from exc
            if not torch.isfinite(loss):
                raise DivergedLoss(
                    f"loss became {loss.item()} at epoch {epoch}, batch {batch_index}",
                    epoch=epoch,
                    batch=batch_index,
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
        scheduler.step()

        try:
            epoch_loss = dataset_loss(net, patches, targets, cfg.gamma, cr3d)
        except ValidationError as exc:
            raise DivergedLoss(f"non-finite prediction after epoch {epoch}", epoch) from exc
        if not np.isfinite(epoch_loss):
            raise DivergedLoss(f"training-set loss became {epoch_loss} at epoch {epoch}", epoch)
        history.append(epoch_loss)
        logger.info(
            "epoch %d/%d loss %.4f lr %.2e",
            epoch,
            cfg.epochs,
            epoch_loss,
            optimizer.param_groups[0]["lr"],
        )

    net.eval()
    return net, history


def evaluate(
    predictor: KeypointPredictor,
    dataset: Dataset,
    *,
    gamma: float = 1.0,
    cr3d: float = MODEL_CROSS_RATIO,
) -> RegressorMetrics:
    """Loss, per-keypoint RMS and cross-ratio error over a whole dataset.

    Networks are evaluated in inference mode; no parameters change.

    Raises:
        EmptyDataset: If the dataset is empty.
    """
    patches, targets = stack_dataset(dataset)
    prediction = predictor.predict(patches)
    losses = batch_keypoint_loss(prediction, targets, gamma, cr3d)

    offsets = (prediction - targets).reshape(-1, NUM_KEYPOINTS, 2)
    per_keypoint = np.sqrt(np.mean(np.sum(offsets * offsets, axis=2), axis=0))
    points = prediction.reshape(-1, NUM_KEYPOINTS, 2)
    left, _ = arm_cross_ratios(points[:, list(LEFT_ARM)])
    right, _ = arm_cross_ratios(points[:, list(RIGHT_ARM)])
    metrics = RegressorMetrics(
        count=len(patches),
        mean_loss=float(np.mean(losses)),
        per_keypoint_rms=tuple(float(v) for v in per_keypoint),
        mean_cr_error_left=float(np.mean(np.abs(left - cr3d))),
        mean_cr_error_right=float(np.mean(np.abs(right - cr3d))),
    )
    logger.info("evaluated %d samples: loss %.4f", metrics.count, metrics.mean_loss)
    return metrics


__all__ = [
    "TrainConfig",
    "RegressorMetrics",
    "stack_dataset",
    "dataset_loss",
    "train",
    "evaluate",
]
