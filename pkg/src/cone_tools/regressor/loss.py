"""Keypoint loss: squared error plus a cross-ratio penalty on each predicted arm.

``loss = sum_i |p_i - g_i|^2 + gamma * sum_arm (Cr(arm) - cr3d)^2``

The cross-ratio is written as ``r13 * r24 / (r14 * r23)`` over distances
clamped below at :data:`DISTANCE_EPSILON`; a clamped distance contributes
no gradient, so coincident predictions never produce NaN.
"""

from __future__ import annotations

import numpy as np
import torch
from numpy.typing import ArrayLike, NDArray

from cone_tools.cone.models import LEFT_ARM, NUM_KEYPOINTS, RIGHT_ARM
from cone_tools.core.exceptions import ShapeMismatch, ValidationError

DISTANCE_EPSILON = 1e-6

# (i, j, sign) of ln r_ij in ln Cr, indices within an arm.
_ARM_PAIRS = ((0, 2, 1.0), (1, 3, 1.0), (0, 3, -1.0), (1, 2, -1.0))
_ARMS = (LEFT_ARM, RIGHT_ARM)


def _as_batch(values: ArrayLike, name: str) -> NDArray[np.float64]:
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array[None]
    if array.ndim != 2 or array.shape[1] != 2 * NUM_KEYPOINTS:
        raise ShapeMismatch(f"{name} must have {2 * NUM_KEYPOINTS} columns, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name} contains non-finite values")
    return array


def _check_weights(gamma: float, cr3d: float) -> None:
    if gamma < 0:
        raise ValidationError(f"gamma must be >= 0, got {gamma}")
    if cr3d <= 0:
        raise ValidationError(f"cr3d must be > 0, got {cr3d}")


def arm_cross_ratios(arms: NDArray[np.float64]) -> tuple[NDArray, NDArray]:
    """Guarded cross-ratio of ``(B, 4, 2)`` arms and its gradient ``(B, 4, 2)``."""
    log_cr = np.zeros(len(arms))
    grad_log = np.zeros_like(arms)
    for i, j, sign in _ARM_PAIRS:
        diff = arms[:, i] - arms[:, j]
        dist = np.linalg.norm(diff, axis=1)
        safe = np.maximum(dist, DISTANCE_EPSILON)
        log_cr += sign * np.log(safe)
        step = sign * diff / (safe * safe)[:, None]
        step[dist < DISTANCE_EPSILON] = 0.0
        grad_log[:, i] += step
        grad_log[:, j] -= step
    cr = np.exp(log_cr)
    return cr, cr[:, None, None] * grad_log


def batch_keypoint_loss_and_gradient(
    pred: ArrayLike, gt: ArrayLike, gamma: float, cr3d: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Per-sample losses ``(B,)`` and gradients ``(B, 14)`` with respect to ``pred``."""
    pred_b = _as_batch(pred, "pred")
    gt_b = _as_batch(gt, "gt")
    if pred_b.shape != gt_b.shape:
        raise ShapeMismatch(f"pred {pred_b.shape} vs gt {gt_b.shape}")
    _check_weights(gamma, cr3d)

    residual = pred_b - gt_b
    loss = np.sum(residual * residual, axis=1)
    grad = 2.0 * residual
    if gamma > 0.0:
        points = pred_b.reshape(-1, NUM_KEYPOINTS, 2)
        point_grad = grad.reshape(-1, NUM_KEYPOINTS, 2)
        for arm in _ARMS:
            cr, cr_grad = arm_cross_ratios(points[:, list(arm)])
            gap = cr - cr3d
            loss = loss + gamma * gap * gap
            point_grad[:, list(arm)] += 2.0 * gamma * gap[:, None, None] * cr_grad
    return loss, grad


def batch_keypoint_loss(pred: ArrayLike, gt: ArrayLike, gamma: float, cr3d: float) -> NDArray:
    return batch_keypoint_loss_and_gradient(pred, gt, gamma, cr3d)[0]


def keypoint_loss(pred: ArrayLike, gt: ArrayLike, gamma: float, cr3d: float) -> float:
    """Loss of one 14-vector prediction against its target, in px^2."""
    return float(batch_keypoint_loss(pred, gt, gamma, cr3d)[0])


def keypoint_loss_gradient(
    pred: ArrayLike, gt: ArrayLike, gamma: float, cr3d: float
) -> NDArray[np.float64]:
    """Analytic gradient of :func:`keypoint_loss` with respect to ``pred``."""
    return batch_keypoint_loss_and_gradient(pred, gt, gamma, cr3d)[1][0]


class KeypointLossFunction(torch.autograd.Function):
    """Batch-mean keypoint loss evaluated in float64 numpy, exposed to autograd."""

    @staticmethod
    def forward(  # type: ignore[override]
        ctx: torch.autograd.function.FunctionCtx,
        pred: torch.Tensor,
        target: torch.Tensor,
        gamma: float,
        cr3d: float,
    ) -> torch.Tensor:
        losses, grads = batch_keypoint_loss_and_gradient(
            pred.detach().double().numpy(), target.detach().double().numpy(), gamma, cr3d
        )
        scale = 1.0 / len(losses)
        ctx.save_for_backward(torch.from_numpy(grads * scale).to(pred.dtype))
        return torch.tensor(float(losses.mean()), dtype=pred.dtype)

    @staticmethod
    def backward(  # type: ignore[override]
        ctx: torch.autograd.function.FunctionCtx, grad_output: torch.Tensor
    ) -> tuple[torch.Tensor, None, None, None]:
        (grad,) = ctx.saved_tensors  # type: ignore[attr-defined]
        return grad_output * grad, None, None, None


def keypoint_loss_tensor(
    pred: torch.Tensor, target: torch.Tensor, gamma: float, cr3d: float
) -> torch.Tensor:
    """Differentiable batch-mean loss for training."""
    return KeypointLossFunction.apply(pred, target, gamma, cr3d)


__all__ = [
    "DISTANCE_EPSILON",
    "arm_cross_ratios",
    "batch_keypoint_loss",
    "batch_keypoint_loss_and_gradient",
    "keypoint_loss",
    "keypoint_loss_gradient",
    "KeypointLossFunction",
    "keypoint_loss_tensor",
]
