"""Archetypal partition versus repeated random splits of the same size."""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .assign import Partition, partition_matrix, holdout_count
from .encode import DatasetSource, EncodedMatrix, encode
from .errors import ConfigError
from .nmf import NmfConfig
from .splitmetrics import METRIC_NAMES, MetricReport, evaluate_split


@dataclass(frozen=True)
class ComparisonReport:
    fraction: float
    benchmake: MetricReport
    random_mean: dict[str, float]
    random_std: dict[str, float]
    seeds: tuple[int, ...]
    partition: Partition


def random_split(n: int, fraction: float, seed: int) -> Partition:
    """Unstratified random split with the same test size rule as the archetypal one."""
    k = holdout_count(n, fraction)
    rng = np.random.default_rng(seed)
    test = np.sort(rng.choice(n, size=k, replace=False))
    mask = np.ones(n, dtype=bool)
    mask[test] = False
    return Partition(test_indices=test, train_indices=np.flatnonzero(mask),
                     fraction=fraction, k=k)


def _evaluate(X: np.ndarray, part: Partition, workers: int) -> MetricReport:
    return evaluate_split(X[part.train_indices], X[part.test_indices], workers=workers)


def compare_matrix(X, fraction: float, n_seeds: int = 20, seeds: Sequence[int] | None = None,
                   config: NmfConfig | None = None, workers: int = 1) -> ComparisonReport:
    X = np.asarray(X, dtype=np.float32)
    seeds = tuple(range(n_seeds)) if seeds is None else tuple(seeds)
    if len(seeds) < 2:
        raise ConfigError(f"need at least 2 random seeds, got {len(seeds)}")

    part = partition_matrix(X, fraction, config, workers=workers)
    bm = _evaluate(X, part, workers)
    rand = np.array([
        [getattr(r, name) for name in METRIC_NAMES]
        for r in (_evaluate(X, random_split(len(X), fraction, s), workers) for s in seeds)
    ])
    mean = rand.mean(axis=0)
    std = rand.std(axis=0, ddof=1)
    return ComparisonReport(
        fraction=fraction,
        benchmake=bm,
        random_mean={n: float(v) for n, v in zip(METRIC_NAMES, mean)},
        random_std={n: float(v) for n, v in zip(METRIC_NAMES, std)},
        seeds=seeds,
        partition=part,
    )


def _matrix(source) -> np.ndarray:
    if isinstance(source, EncodedMatrix):
        return source.values
    if isinstance(source, DatasetSource):
        return encode(source).values
    return np.asarray(source, dtype=np.float32)


def compare(source, fraction: float, n_seeds: int = 20, seeds: Sequence[int] | None = None,
            config: NmfConfig | None = None, workers: int | None = None) -> ComparisonReport:
    """``source`` may be a DatasetSource, an EncodedMatrix or a plain array."""
    return compare_matrix(_matrix(source), fraction, n_seeds, seeds, config,
                          workers or os.cpu_count() or 1)


def sweep(source, fractions: Sequence[float], n_seeds: int = 20,
          seeds: Sequence[int] | None = None, config: NmfConfig | None = None,
          workers: int | None = None) -> list[ComparisonReport]:
    if seeds is None and n_seeds < 2:
        raise ConfigError(f"need at least 2 random seeds, got {n_seeds}")
    for f in fractions:
        if not 0 < f < 1:
            raise ConfigError(f"fraction must lie strictly between 0 and 1, got {f}")
    if not fractions:
        return []
    X = _matrix(source)
    w = workers or os.cpu_count() or 1
    return [compare_matrix(X, f, n_seeds, seeds, config, w) for f in fractions]
