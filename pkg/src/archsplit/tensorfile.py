"""Binary tensor container used for image, signal and node-feature inputs.

Layout (all little-endian)::

    8 bytes   magic  b"BMTENSR1"
    uint32    rank   (2, 3 or 4)
    uint64    dims[rank]
    float32   payload, row-major, prod(dims) values
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import DataError

MAGIC = b"BMTENSR1"
VALID_RANKS = (2, 3, 4)


def write_tensor(path, array) -> None:
    arr = np.ascontiguousarray(array, dtype="<f4")
    if arr.ndim not in VALID_RANKS:
        raise DataError(f"tensor rank must be one of {VALID_RANKS}, got {arr.ndim}")
    header = MAGIC + struct.pack("<I", arr.ndim) + struct.pack(f"<{arr.ndim}Q", *arr.shape)
    Path(path).write_bytes(header + arr.tobytes())


def read_tensor(path) -> np.ndarray:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 12 or blob[:8] != MAGIC:
        raise DataError(f"{path}: not a tensor file (bad magic)")
    (rank,) = struct.unpack_from("<I", blob, 8)
    if rank not in VALID_RANKS:
        raise DataError(f"{path}: unsupported rank {rank}")
    off = 12 + 8 * rank
    if len(blob) < off:
        raise DataError(f"{path}: truncated header")
    dims = struct.unpack_from(f"<{rank}Q", blob, 12)
    expected = 4 * int(np.prod(dims, dtype=np.int64))
    if len(blob) - off != expected:
        raise DataError(
            f"{path}: payload is {len(blob) - off} bytes, dims {dims} need {expected}")
    arr = np.frombuffer(blob, dtype="<f4", offset=off).reshape(dims)
    return arr.astype(np.float32)
