"""Minimal binary tensor container ("TKZT").

Layout, all little-endian:

    magic   4 bytes  b"TKZT"
    version u16      currently 1
    dtype   u8       1 = float32
    ndim    u8
    dims    u32 * ndim
    payload row-major IEEE-754 float32

The format is deliberately tiny so exporters in any ML stack can emit it in
a few lines; round-trips are bitwise lossless for finite float32 payloads.
"""

import struct

import numpy as np

from .errors import ParseError

MAGIC = b"TKZT"
VERSION = 1
DTYPE_F32 = 1

_HEADER = struct.Struct("<4sHBB")


def write_tensor(path, array):
    """Write an array as a float32 TKZT file."""
    arr = np.ascontiguousarray(array, dtype="<f4")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, DTYPE_F32, arr.ndim))
        f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        f.write(arr.tobytes())


def read_tensor(path):
    """Read a TKZT file back into a float32 array.

    Raises ParseError (naming the file) for bad magic, unknown version or
    dtype, and truncated or oversized payloads.
    """
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < _HEADER.size:
        raise ParseError("file shorter than the fixed header", path)
    magic, version, dtype, ndim = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r}, expected {MAGIC!r}", path)
    if version != VERSION:
        raise ParseError(f"unknown version {version}", path)
    if dtype != DTYPE_F32:
        raise ParseError(f"unknown dtype code {dtype}", path)
    dims_end = _HEADER.size + 4 * ndim
    if len(data) < dims_end:
        raise ParseError("truncated dims", path)
    dims = struct.unpack_from(f"<{ndim}I", data, _HEADER.size)
    expected = 4 * int(np.prod(dims, dtype=np.int64)) if ndim else 4
    payload = data[dims_end:]
    if len(payload) != expected:
        raise ParseError(
            f"payload length {len(payload)} does not match dims {dims} (expected {expected})",
            path,
        )
    arr = np.frombuffer(payload, dtype="<f4")
    return arr.reshape(dims).copy()
