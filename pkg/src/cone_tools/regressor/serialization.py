"""The "KPRN" model file: layer spec header followed by float64 parameters.

Layout (little-endian)::

    magic "KPRN" | version u32 | input_size u32 | normalization u8
    | layer count u32 | per layer: kind u8, kernel u32, stride u32, padding u32, channels u32
    | value count u64 | every state_dict tensor in registration order as float64

Normalization running statistics and batch counters are stored with the
weights so a loaded network reproduces evaluation exactly.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import torch

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
from cone_tools.core.exceptions import ConeToolsError, CorruptFile

from .network import LayerKind, LayerSpec, RegressorNet

logger = logging.getLogger(__name__)

MAGIC = b"KPRN"
VERSION = 1

_F8 = np.dtype("<f8")


def save_model(net: RegressorNet, path: str | Path) -> None:
    """Write ``net`` to ``path``."""
    path = Path(path)
    state = net.state_dict()
    values = [tensor.detach().cpu().double().numpy().reshape(-1) for tensor in state.values()]
    total = sum(v.size for v in values)
    with path.open("wb") as stream:
        write_header(stream, MAGIC, VERSION)
        stream.write(pack_u32(net.input_size))
        stream.write(pack_u8(int(net.normalization)))
        stream.write(pack_u32(len(net.layers)))
        for spec in net.layers:
            stream.write(pack_u8(int(spec.kind)))
            for field in (spec.kernel, spec.stride, spec.padding, spec.channels):
                stream.write(pack_u32(field))
        stream.write(pack_u64(total))
        for array in values:
            stream.write(array.astype(_F8).tobytes())
    logger.debug("saved model with %d values to %s", total, path)


def load_model(path: str | Path) -> RegressorNet:
    """Rebuild a network from a file written by :func:`save_model`.

    The returned network is in evaluation mode.

    Raises:
        CorruptFile: On bad magic, truncation, trailing bytes or a layer
            spec / value count that does not describe a valid network.
        VersionMismatch: On an unknown format version.
    """
    path = Path(path)
    with path.open("rb") as stream:
        read_header(stream, MAGIC, VERSION, source=path)
        input_size = read_u32(stream, path)
        normalization = bool(read_u8(stream, path))
        layer_count = read_u32(stream, path)
        layers = []
        try:
            for _ in range(layer_count):
                kind = LayerKind(read_u8(stream, path))
                kernel, stride, padding, channels = (read_u32(stream, path) for _ in range(4))
                layers.append(
                    LayerSpec(
                        kind=kind, kernel=kernel, stride=stride, padding=padding, channels=channels
                    )
                )
            net = RegressorNet(layers, input_size=input_size, normalization=normalization)
        except CorruptFile:
            raise
        except (ConeToolsError, ValueError) as exc:
            raise CorruptFile(f"invalid layer spec: {exc}", source=path) from exc

        state = net.state_dict()
        expected = sum(t.numel() for t in state.values())
        total = read_u64(stream, path)
        if total != expected:
            raise CorruptFile(f"file holds {total} values, network needs {expected}", source=path)
        loaded = {}
        for name, tensor in state.items():
            raw = read_exact(stream, tensor.numel() * _F8.itemsize, path)
            array = np.frombuffer(raw, dtype=_F8).reshape(tensor.shape)
            loaded[name] = torch.from_numpy(array.copy()).to(tensor.dtype)
        ensure_eof(stream, path)
    net.load_state_dict(loaded)
    net.eval()
    logger.debug("loaded model with %d values from %s", expected, path)
    return net


__all__ = ["MAGIC", "VERSION", "save_model", "load_model"]
