"""Synthetic datasets with known edge cases."""
from __future__ import annotations

import numpy as np


def planted_outliers(n_bulk: int = 480, n_outliers: int = 20, radius: float = 5.0,
                     seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """A 2-D standard Gaussian cloud plus points evenly spaced on a circle.

    Returns the float32 data and the indices of the planted points, which sit
    after the bulk rows.
    """
    rng = np.random.default_rng(seed)
    bulk = rng.standard_normal((n_bulk, 2))
    theta = 2 * np.pi * np.arange(n_outliers) / n_outliers
    ring = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    X = np.vstack([bulk, ring]).astype(np.float32)
    return X, np.arange(n_bulk, n_bulk + n_outliers)


def gaussian_table(n: int = 500, d: int = 10, seed: int = 0) -> np.ndarray:
    """Skewed mixed-scale tabular data."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d)) * rng.uniform(0.5, 20, d) + rng.uniform(-5, 5, d)
    X[:, ::3] = np.exp(X[:, ::3] / np.abs(X[:, ::3]).max())
    return X.astype(np.float32)


def write_csv(path, X, header: list[str] | None = None) -> None:
    lines = [] if header is None else [",".join(header)]
    lines += [",".join(repr(float(v)) for v in row) for row in np.asarray(X, dtype=np.float32)]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
