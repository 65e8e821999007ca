"""Content-based row ordering and min-max scaling.

Rows are fingerprinted with MD5 over their little-endian float32 bytes and
sorted by digest, so the same data always lands in the same order no matter
how the rows were shuffled on disk.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class CanonicalOrder:
    permutation: np.ndarray  # canonical position -> original row index
    digests: tuple[bytes, ...]  # in canonical order

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.permutation)
        inv[self.permutation] = np.arange(len(self.permutation))
        return inv


@dataclass(frozen=True)
class ScaledMatrix:
    values: np.ndarray
    col_min: np.ndarray
    col_range: np.ndarray


def row_digest(row) -> bytes:
    """MD5 of a row serialised as contiguous little-endian float32."""
    buf = np.ascontiguousarray(row, dtype="<f4").tobytes()
    return hashlib.md5(buf).digest()


def canonical_order(matrix) -> CanonicalOrder:
    X = np.asarray(matrix, dtype=np.float32)
    if X.ndim != 2 or X.shape[0] < 1:
        raise DataError(f"expected a non-empty 2-D matrix, got shape {X.shape}")
    digests = [row_digest(r) for r in X]
    # duplicate rows share a digest; fall back to original index
    perm = sorted(range(X.shape[0]), key=lambda i: (digests[i], i))
    return CanonicalOrder(
        permutation=np.asarray(perm, dtype=np.int64),
        digests=tuple(digests[i] for i in perm),
    )


def min_max_scale(matrix) -> ScaledMatrix:
    X = np.asarray(matrix, dtype=np.float32)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise DataError(f"cannot scale an empty matrix of shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DataError("matrix contains non-finite values")
    col_min = X.min(axis=0)
    col_range = X.max(axis=0) - col_min
    flat = col_range == 0
    denom = np.where(flat, np.float32(1), col_range)
    values = (X - col_min) / denom
    values[:, flat] = 0
    # float32 rounding can land a hair outside [0, 1]
    np.clip(values, 0, 1, out=values)
    return ScaledMatrix(values=values.astype(np.float32, copy=False),
                        col_min=col_min, col_range=col_range)
