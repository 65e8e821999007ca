"""Match archetypes to real instances and cut the dataset into train/test."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .canonical import canonical_order, min_max_scale
from .encode import DatasetSource, EncodedMatrix, encode
from .errors import ConfigError, DataError
from .nmf import FactorPair, NmfConfig, factorize


@dataclass(frozen=True)
class DistanceMatrix:
    D: np.ndarray
    batch_size: int


@dataclass(frozen=True)
class Partition:
    test_indices: np.ndarray  # original order, ascending
    train_indices: np.ndarray  # original order, ascending
    fraction: float
    k: int
    canonical_test_positions: tuple[int, ...] = ()  # archetype order


def holdout_count(n: int, fraction: float) -> int:
    """Number of test instances: floor(fraction * n) clamped to [1, n - 1]."""
    if not 0 < fraction < 1:
        raise ConfigError(f"fraction must lie strictly between 0 and 1, got {fraction}")
    if n < 2:
        raise DataError(f"need at least 2 instances to split, got {n}")
    return min(max(math.floor(fraction * n), 1), n - 1)


def default_batch_size(n: int, workers: int) -> int:
    return max(1, math.ceil(n / (4 * max(1, workers))))


def _distance_block(X: np.ndarray, H: np.ndarray) -> np.ndarray:
    # explicit loop over features fixes the summation order per entry
    acc = np.zeros((X.shape[0], H.shape[0]), dtype=np.float32)
    for f in range(X.shape[1]):
        diff = X[:, f, None] - H[None, :, f]
        acc += diff * diff
    return np.sqrt(acc)


def batched_distances(Xs, H, batch_size: int | None = None,
                      workers: int = 1) -> DistanceMatrix:
    """Euclidean distance from every row of ``Xs`` to every archetype in ``H``."""
    Xs = np.asarray(Xs, dtype=np.float32)
    H = np.asarray(H, dtype=np.float32)
    if Xs.ndim != 2 or H.ndim != 2 or Xs.shape[1] != H.shape[1]:
        raise DataError(f"shape mismatch: X {Xs.shape}, H {H.shape}")
    n = Xs.shape[0]
    if batch_size is None:
        batch_size = default_batch_size(n, workers)
    if batch_size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {batch_size}")

    D = np.empty((n, H.shape[0]), dtype=np.float32)
    starts = range(0, n, batch_size)

    def run(start):
        stop = min(start + batch_size, n)
        D[start:stop] = _distance_block(Xs[start:stop], H)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)
    return DistanceMatrix(D=D, batch_size=batch_size)


def match_archetypes(D) -> list[int]:
    """Greedy unique nearest instance per archetype, in archetype order.

    Exact ties go to the smaller row position.
    """
    if isinstance(D, DistanceMatrix):
        D = D.D
    D = np.asarray(D)
    n, k = D.shape
    if k > n:
        raise ConfigError(f"cannot match {k} archetypes to {n} instances")
    taken = np.zeros(n, dtype=bool)
    chosen = []
    for j in range(k):
        col = np.where(taken, np.inf, D[:, j])
        pos = int(np.argmin(col))  # first minimum == smallest index
        chosen.append(pos)
        taken[pos] = True
    return chosen


@dataclass(frozen=True)
class PartitionTrace:
    """Intermediate products of a partition run, kept for inspection."""
    partition: Partition
    permutation: np.ndarray
    scaled: np.ndarray
    factors: FactorPair
    distances: DistanceMatrix


def partition_matrix(X, fraction: float, config: NmfConfig | None = None,
                     batch_size: int | None = None, workers: int = 1,
                     return_trace: bool = False):
    X = np.asarray(X, dtype=np.float32)
    if X.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got shape {X.shape}")
    n = X.shape[0]
    k = holdout_count(n, fraction)
    config = replace(config or NmfConfig(), k=k)

    order = canonical_order(X)
    perm = order.permutation
    scaled = min_max_scale(X[perm]).values
    factors = factorize(scaled, config)
    dist = batched_distances(scaled, factors.H, batch_size, workers)
    positions = match_archetypes(dist)

    test = np.sort(perm[positions])
    mask = np.ones(n, dtype=bool)
    mask[test] = False
    part = Partition(
        test_indices=test,
        train_indices=np.flatnonzero(mask),
        fraction=fraction,
        k=k,
        canonical_test_positions=tuple(positions),
    )
    if return_trace:
        return PartitionTrace(part, perm, scaled, factors, dist)
    return part


def partition(source: DatasetSource | EncodedMatrix, fraction: float,
              config: NmfConfig | None = None, batch_size: int | None = None,
              workers: int | None = None) -> Partition:
    """Encode, order, scale, factorise, match. Labels play no part."""
    if not 0 < fraction < 1:
        raise ConfigError(f"fraction must lie strictly between 0 and 1, got {fraction}")
    enc = source if isinstance(source, EncodedMatrix) else encode(source)
    workers = workers or os.cpu_count() or 1
    return partition_matrix(enc.values, fraction, config, batch_size, workers)
