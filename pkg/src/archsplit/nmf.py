"""Non-negative matrix factorisation by multiplicative updates.

X (m x d) is approximated by W (m x k) @ H (k x d); the rows of H are the
archetypes. Every update is carried out in float32. The squared Frobenius
error of the float32 factors is evaluated in float64 after each step, so the
recorded trace reflects the iterates rather than rounding in the residual.
Iteration also stops once the error reaches float32 resolution, where no
further progress is representable, or when a step fails to lower it.

``factorize`` fits X / max|X| and scales W back afterwards. The denominator
guard is absolute, so on data far below unit scale it would swamp the
denominators and the updates would stop descending. Min-max scaled inputs
have max|X| = 1, where this is an exact no-op.

Initial values come from numpy's PCG64 generator (``default_rng(seed)``):
uniform draws u in [0, 1) mapped to ``init_scale * (1 - u)``, filling W row
by row and then H row by row.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import ConfigError


@dataclass(frozen=True)
class NmfConfig:
    k: int = 1
    max_iterations: int = 300
    tolerance: float = 1e-4
    epsilon: float = 1e-9
    seed: int = 42
    init_scale: float = 0.01

    def validate(self, m: int, d: int) -> None:
        # k may exceed d: an archetype per test instance is routinely more than
        # the feature count, and the updates remain well defined.
        if not 1 <= self.k <= m:
            raise ConfigError(f"k={self.k} must lie in [1, {m}] for {m} rows")
        if d < 1:
            raise ConfigError("matrix has no columns")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if not self.init_scale > 0:
            raise ConfigError(f"init_scale must be positive, got {self.init_scale}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class FactorPair:
    W: np.ndarray
    H: np.ndarray
    error_trace: tuple[float, ...] = ()
    iterations_run: int = 0
    converged: bool = False


def frobenius_error(X: np.ndarray, W: np.ndarray, H: np.ndarray) -> float:
    """||X - WH||_F^2 evaluated in float64."""
    R = X.astype(np.float64) - W.astype(np.float64) @ H.astype(np.float64)
    return float(np.einsum("ij,ij->", R, R))


def resolution_floor(X: np.ndarray, k: int) -> float:
    """Squared error below which float32 updates cannot resolve progress.

    One update rounds each factor entry through two k-term dot products, a
    division and a multiplication, giving a per-entry bound of (2k + 3) eps.
    """
    scale = float(np.max(np.abs(X))) if X.size else 0.0
    return X.size * ((2 * k + 3) * float(np.finfo(np.float32).eps) * scale) ** 2


def init_factors(m: int, d: int, config: NmfConfig) -> FactorPair:
    config.validate(m, d)
    rng = np.random.default_rng(config.seed)
    u = rng.random(m * config.k + config.k * d)
    vals = (config.init_scale * (1.0 - u)).astype(np.float32)
    W = vals[: m * config.k].reshape(m, config.k)
    H = vals[m * config.k:].reshape(config.k, d)
    return FactorPair(W=W, H=H)


def update_step(X: np.ndarray, factors: FactorPair, epsilon: float = 1e-9) -> FactorPair:
    """One multiplicative update of H, then of W, followed by the error."""
    X = np.asarray(X, dtype=np.float32)
    eps = np.float32(epsilon)
    W, H = factors.W, factors.H

    H = H * (W.T @ X) / ((W.T @ W) @ H + eps)
    np.maximum(H, 0, out=H)
    W = W * (X @ H.T) / (W @ (H @ H.T) + eps)
    np.maximum(W, 0, out=W)

    err = frobenius_error(X, W, H)
    return replace(factors, W=W, H=H,
                   error_trace=factors.error_trace + (err,),
                   iterations_run=factors.iterations_run + 1)


def _rescale(factors: FactorPair, scale: float) -> FactorPair:
    if scale == 1.0:
        return factors
    return replace(factors, W=(factors.W * np.float32(scale)).astype(np.float32),
                   error_trace=tuple(e * scale * scale for e in factors.error_trace))


def factorize(X, config: NmfConfig, callback=None) -> FactorPair:
    """Run update steps until the relative error change drops to ``tolerance``.

    A step that raises the error is discarded and iteration stops, so the
    returned trace never increases. ``callback``, if given, receives the
    factors after every accepted step.
    """
    X = np.asarray(X, dtype=np.float32)
    m, d = X.shape
    factors = init_factors(m, d, config)
    scale = float(np.max(np.abs(X))) if X.size else 0.0
    if scale == 0.0:
        scale = 1.0
    Xn = X if scale == 1.0 else X / np.float32(scale)
    # single-threaded BLAS keeps every product bit-stable whatever the machine
    with threadpool_limits(limits=1, user_api="blas"):
        floor = resolution_floor(Xn, config.k)
        prev = None
        for _ in range(config.max_iterations):
            step = update_step(Xn, factors, config.epsilon)
            curr = step.error_trace[-1]
            if prev is not None and curr > prev:
                # the stop rule fires on a rise anyway; keep the better iterate
                return _rescale(replace(factors, converged=True), scale)
            factors = step
            if callback is not None:
                callback(_rescale(factors, scale))
            if curr <= floor:
                return _rescale(replace(factors, converged=True), scale)
            if prev is not None and (prev - curr) / max(prev, config.epsilon) <= config.tolerance:
                return _rescale(replace(factors, converged=True), scale)
            prev = curr
    return _rescale(factors, scale)


def relative_error(X, factors: FactorPair) -> float:
    X = np.asarray(X, dtype=np.float32)
    denom = float(np.linalg.norm(X.astype(np.float64)))
    return float(np.sqrt(frobenius_error(X, factors.W, factors.H))) / denom if denom else 0.0
