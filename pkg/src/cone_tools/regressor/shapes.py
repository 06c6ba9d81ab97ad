"""Convolution output-size arithmetic."""

from __future__ import annotations

from cone_tools.core.exceptions import NonPositiveOutput, ValidationError


def conv_output_shape(
    in_size: int,
    kernel: int,
    padding: int = 0,
    stride: int = 1,
    dilation: int = 1,
) -> int:
    """Spatial output size of a convolution along one axis.

    ``floor((in + 2*padding - dilation*(kernel - 1) - 1) / stride + 1)``

    Raises:
        ValidationError: If an argument is out of range.
        NonPositiveOutput: If the result is below 1.
    """
    if min(in_size, kernel, stride, dilation) < 1 or padding < 0:
        raise ValidationError(
            f"invalid conv arguments: in={in_size} kernel={kernel} padding={padding} "
            f"stride={stride} dilation={dilation}"
        )
    out = (in_size + 2 * padding - dilation * (kernel - 1) - 1) // stride + 1
    if out < 1:
        raise NonPositiveOutput(
            f"kernel {kernel} (dilation {dilation}) does not fit input {in_size} "
            f"with padding {padding}"
        )
    return out


__all__ = ["conv_output_shape"]
