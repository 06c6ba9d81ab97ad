"""Little-endian binary helpers shared by the model and dataset file formats."""

from __future__ import annotations

import struct
from typing import BinaryIO

from .exceptions import CorruptFile, VersionMismatch

_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_U8 = struct.Struct("<B")


def write_header(stream: BinaryIO, magic: bytes, version: int) -> None:
    """Write a 4-byte magic followed by a u32 version."""
    if len(magic) != 4:
        raise ValueError(f"magic must be 4 bytes, got {magic!r}")
    stream.write(magic)
    stream.write(_U32.pack(version))


def read_header(stream: BinaryIO, magic: bytes, version: int, source: object = None) -> int:
    """Check magic and version; return the version read.

    Raises:
        CorruptFile: On a short read or wrong magic.
        VersionMismatch: When the version differs from ``version``.
    """
    found = read_exact(stream, 4, source)
    if found != magic:
        raise CorruptFile(f"bad magic {found!r}, expected {magic!r}", source=source)
    found_version = read_u32(stream, source)
    if found_version != version:
        raise VersionMismatch(
            f"unsupported version {found_version}, expected {version}", source=source
        )
    return found_version


def read_exact(stream: BinaryIO, size: int, source: object = None) -> bytes:
    """Read exactly ``size`` bytes or raise CorruptFile."""
    data = stream.read(size)
    if len(data) != size:
        raise CorruptFile(f"truncated: wanted {size} bytes, got {len(data)}", source=source)
    return data


def ensure_eof(stream: BinaryIO, source: object = None) -> None:
    """Raise CorruptFile when bytes remain after the declared payload."""
    if stream.read(1):
        raise CorruptFile("trailing bytes after payload", source=source)


def pack_u8(value: int) -> bytes:
    return _U8.pack(value)


def pack_u32(value: int) -> bytes:
    return _U32.pack(value)


def pack_u64(value: int) -> bytes:
    return _U64.pack(value)


def read_u8(stream: BinaryIO, source: object = None) -> int:
    return _U8.unpack(read_exact(stream, _U8.size, source))[0]


def read_u32(stream: BinaryIO, source: object = None) -> int:
    return _U32.unpack(read_exact(stream, _U32.size, source))[0]


def read_u64(stream: BinaryIO, source: object = None) -> int:
    return _U64.unpack(read_exact(stream, _U64.size, source))[0]


__all__ = [
    "write_header",
    "read_header",
    "read_exact",
    "ensure_eof",
    "pack_u8",
    "pack_u32",
    "pack_u64",
    "read_u8",
    "read_u32",
    "read_u64",
]
