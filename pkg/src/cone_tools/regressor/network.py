"""Residual CNN mapping an RGB cone patch to seven keypoint coordinates.

Layout: a conv/norm/ReLU stem, a chain of residual blocks (stride 2
between blocks), then one affine layer from the flattened feature map to
the 14 outputs. Coordinates are patch pixels with no output squashing.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from enum import IntEnum

import numpy as np
import torch
from numpy.typing import ArrayLike, NDArray
from pydantic import Field
from torch import nn

from cone_tools.cone.models import NUM_KEYPOINTS
from cone_tools.core.exceptions import NonPositiveOutput, ShapeMismatch, ValidationError
from cone_tools.core.models import FrozenModel

from .shapes import conv_output_shape

OUTPUT_DIM = 2 * NUM_KEYPOINTS
DEFAULT_CHANNELS = (8, 16, 32, 64)
DEFAULT_INPUT_SIZE = 80
# Inference batch size; fixed so repeated evaluations reduce in the same order.
EVAL_CHUNK = 256


class LayerKind(IntEnum):
    CONV = 0
    RESIDUAL = 1
    LINEAR = 2


class LayerSpec(FrozenModel):
    """One stage of the network; ``channels`` is the output width."""

    kind: LayerKind
    kernel: int = Field(default=3, ge=1)
    stride: int = Field(default=1, ge=1)
    padding: int = Field(default=1, ge=0)
    channels: int = Field(ge=1)


def default_layer_specs(channels: Sequence[int] = DEFAULT_CHANNELS) -> tuple[LayerSpec, ...]:
    """Stem at ``channels[0]``, one residual block per width, then the affine head."""
    if not channels:
        raise ValidationError("at least one channel width is required")
    layers = [LayerSpec(kind=LayerKind.CONV, channels=channels[0])]
    for index, width in enumerate(channels):
        layers.append(
            LayerSpec(kind=LayerKind.RESIDUAL, stride=1 if index == 0 else 2, channels=width)
        )
    layers.append(
        LayerSpec(kind=LayerKind.LINEAR, kernel=1, stride=1, padding=0, channels=OUTPUT_DIM)
    )
    return tuple(layers)


def _norm(channels: int, enabled: bool) -> nn.Module:
    return nn.BatchNorm2d(channels) if enabled else nn.Identity()


class ResidualBlock(nn.Module):
    """Two 3x3 convolutions with a projection shortcut when the shape changes."""

    def __init__(self, in_channels: int, spec: LayerSpec, normalization: bool) -> None:
        super().__init__()
        self.conv1 = nn.Conv2d(
            in_channels, spec.channels, spec.kernel, spec.stride, spec.padding, bias=True
        )
        self.norm1 = _norm(spec.channels, normalization)
        self.conv2 = nn.Conv2d(spec.channels, spec.channels, spec.kernel, 1, spec.padding)
        self.norm2 = _norm(spec.channels, normalization)
        self.shortcut: nn.Module = nn.Identity()
        if spec.stride != 1 or in_channels != spec.channels:
            self.shortcut = nn.Sequential(
                nn.Conv2d(in_channels, spec.channels, 1, spec.stride, 0),
                _norm(spec.channels, normalization),
            )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        out = torch.relu(self.norm1(self.conv1(x)))
        out = self.norm2(self.conv2(out))
        return torch.relu(out + self.shortcut(x))


class RegressorNet(nn.Module):
    """Patch -> 14-vector keypoint regressor.

    Args:
        layers: Stage specs; must end with a single LINEAR layer of width 14.
        input_size: Square patch side in pixels.
        normalization: Use batch normalization after each convolution.
        seed: Seed of the uniform ``+-1/sqrt(fan_in)`` parameter initialization.

    Raises:
        ShapeMismatch: If the layer chain does not end in a 14-wide affine
            layer or a spatial size collapses.
    """

    def __init__(
        self,
        layers: Sequence[LayerSpec] | None = None,
        input_size: int = DEFAULT_INPUT_SIZE,
        normalization: bool = True,
        seed: int = 0,
    ) -> None:
        super().__init__()
        self.layers = tuple(layers) if layers is not None else default_layer_specs()
        self.input_size = input_size
        self.normalization = normalization

        head = self.layers[-1] if self.layers else None
        if head is None or head.kind is not LayerKind.LINEAR or head.channels != OUTPUT_DIM:
            raise ShapeMismatch(f"layer chain must end with a LINEAR layer of {OUTPUT_DIM}")
        if any(spec.kind is LayerKind.LINEAR for spec in self.layers[:-1]):
            raise ShapeMismatch("only the final layer may be LINEAR")

        stages: list[nn.Module] = []
        channels, size = 3, input_size
        for spec in self.layers[:-1]:
            try:
                size = conv_output_shape(size, spec.kernel, spec.padding, spec.stride)
            except (NonPositiveOutput, ValidationError) as exc:
                raise ShapeMismatch(f"layer {spec} breaks the shape chain: {exc}") from exc
            if spec.kind is LayerKind.CONV:
                stages.append(
                    nn.Sequential(
                        nn.Conv2d(channels, spec.channels, spec.kernel, spec.stride, spec.padding),
                        _norm(spec.channels, normalization),
                        nn.ReLU(),
                    )
                )
            else:
                stages.append(ResidualBlock(channels, spec, normalization))
                # Second conv of the block runs at stride 1.
                size = conv_output_shape(size, spec.kernel, spec.padding, 1)
            channels = spec.channels

        self.features = nn.Sequential(*stages)
        self.flat_features = channels * size * size
        self.head = nn.Linear(self.flat_features, OUTPUT_DIM)
        self._initialize(seed)

    def _initialize(self, seed: int) -> None:
        generator = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            for module in self.modules():
                if isinstance(module, nn.Conv2d | nn.Linear):
                    fan_in = module.weight[0].numel()
                    bound = 1.0 / math.sqrt(fan_in)
                    module.weight.uniform_(-bound, bound, generator=generator)
                    if module.bias is not None:
                        module.bias.uniform_(-bound, bound, generator=generator)

    def set_output_bias(self, values: ArrayLike) -> None:
        """Overwrite the affine head's bias, e.g. with the mean training target."""
        bias = torch.as_tensor(np.asarray(values, dtype=np.float64).reshape(OUTPUT_DIM))
        with torch.no_grad():
            self.head.bias.copy_(bias.to(self.head.bias.dtype))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        features = self.features(x)
        return self.head(features.flatten(start_dim=1))

    def predict(self, patches: ArrayLike) -> NDArray[np.float64]:
        """Inference on ``(N, P, P, 3)`` patches; returns ``(N, 14)`` float64.

        Runs in evaluation mode (running normalization statistics) in fixed
        chunks and restores the previous mode afterwards.
        """
        batch = np.asarray(patches, dtype=np.float32)
        if batch.ndim == 3:
            batch = batch[None]
        expected = (self.input_size, self.input_size, 3)
        if batch.ndim != 4 or batch.shape[1:] != expected:
            side = self.input_size
            raise ShapeMismatch(f"expected (N, {side}, {side}, 3), got {batch.shape}")
        was_training = self.training
        self.eval()
        outputs = []
        with torch.no_grad():
            for start in range(0, len(batch), EVAL_CHUNK):
                chunk = to_tensor(batch[start : start + EVAL_CHUNK])
                outputs.append(self(chunk).double().numpy())
        self.train(was_training)
        return np.concatenate(outputs, axis=0)


def to_tensor(patches: NDArray[np.float32]) -> torch.Tensor:
    """``(N, P, P, 3)`` -> contiguous ``(N, 3, P, P)`` float32 tensor."""
    return torch.from_numpy(np.ascontiguousarray(patches.transpose(0, 3, 1, 2), dtype=np.float32))


def forward(net: RegressorNet, patch: ArrayLike) -> NDArray[np.float64]:
    """Predict the 14-vector for a single ``(P, P, 3)`` patch.

    Raises:
        ShapeMismatch: If the patch does not match ``net.input_size``.
    """
    array = np.asarray(patch)
    if array.shape != (net.input_size, net.input_size, 3):
        raise ShapeMismatch(
            f"patch shape {array.shape} does not match input size {net.input_size}"
        )
    return net.predict(array[None])[0]


__all__ = [
    "OUTPUT_DIM",
    "DEFAULT_CHANNELS",
    "DEFAULT_INPUT_SIZE",
    "EVAL_CHUNK",
    "LayerKind",
    "LayerSpec",
    "default_layer_specs",
    "ResidualBlock",
    "RegressorNet",
    "forward",
    "to_tensor",
]
