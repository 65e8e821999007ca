"""Divergence and two-sample statistics between a train and a test set.

Every metric is computed one feature column at a time and then averaged over
features. Histogram-based metrics share 50 bins laid over the pooled range of
both samples.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DataError

N_BINS = 50
KL_SMOOTHING = 1e-10
MMD_MAX_POINTS = 2000
KS_TERMS = 20

METRIC_NAMES = ("t_p", "ks_p", "mi", "kl", "js", "wasserstein", "mmd")


@dataclass(frozen=True)
class HistogramPair:
    bin_edges: np.ndarray
    p_train: np.ndarray
    p_test: np.ndarray
    c_train: np.ndarray
    c_test: np.ndarray


@dataclass(frozen=True)
class MetricReport:
    t_p: float
    ks_p: float
    mi: float
    kl: float
    js: float
    wasserstein: float
    mmd: float
    per_feature: np.ndarray  # (d, 7), columns in METRIC_NAMES order

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _sample(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        raise DataError("sample is empty")
    return x


def histogram_pair(train_col, test_col, bins: int = N_BINS) -> HistogramPair:
    a, b = _sample(train_col), _sample(test_col)
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if lo == hi:
        # one shared value: put everything in the first bin
        edges = np.linspace(lo, lo + 1.0, bins + 1)
    else:
        edges = np.linspace(lo, hi, bins + 1)
    ca = np.histogram(a, edges)[0]
    cb = np.histogram(b, edges)[0]
    return HistogramPair(edges, ca / ca.sum(), cb / cb.sum(), ca, cb)


def kolmogorov_sf(lam: float, terms: int = KS_TERMS) -> float:
    """Survival function of the Kolmogorov distribution by its alternating series."""
    if lam <= 0:
        return 1.0
    total = 0.0
    for j in range(1, terms + 1):
        term = 2.0 * (-1) ** (j - 1) * math.exp(-2.0 * j * j * lam * lam)
        total += term
        if abs(term) <= 1e-12 * abs(total) or abs(term) < 1e-300:
            return min(max(total, 0.0), 1.0)
    # series has not settled: lam is tiny and the tail probability is ~1
    return 1.0


def ks_statistic(train_col, test_col) -> float:
    a, b = np.sort(_sample(train_col)), np.sort(_sample(test_col))
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_test(train_col, test_col) -> float:
    """Two-sample KS p-value from the asymptotic Kolmogorov distribution."""
    a, b = _sample(train_col), _sample(test_col)
    d = ks_statistic(a, b)
    ne = a.size * b.size / (a.size + b.size)
    return kolmogorov_sf(math.sqrt(ne) * d)


def _mean_var(x: np.ndarray) -> tuple[float, float]:
    # an exactly constant sample gets exact moments, not rounding residue
    if x.min() == x.max():
        return float(x[0]), 0.0
    return float(x.mean()), float(x.var(ddof=1))


def t_test(train_col, test_col) -> float:
    """Welch's two-sided t-test p-value."""
    a, b = _sample(train_col), _sample(test_col)
    if a.size < 2 or b.size < 2:
        raise DataError("t-test needs at least two values in each sample")
    # the statistic is scale-free; unit magnitude keeps squared terms representable
    scale = max(np.abs(a).max(), np.abs(b).max())
    if 0 < scale < np.inf:
        a, b = a / scale, b / scale
    ma, va = _mean_var(a)
    mb, vb = _mean_var(b)
    va, vb = va / a.size, vb / b.size
    diff = ma - mb
    se2 = va + vb
    if se2 == 0:
        return 1.0 if diff == 0 else 0.0
    t = diff / math.sqrt(se2)
    # Welch-Satterthwaite in variance shares: squaring tiny variances underflows
    ra, rb = va / se2, vb / se2
    df = 1.0 / (ra * ra / (a.size - 1) + rb * rb / (b.size - 1))
    return float(min(1.0, 2.0 * stats.t.sf(abs(t), df)))


def mutual_information(train_col, test_col, bins: int = N_BINS) -> float:
    """MI (nats) between the binned value and train/test membership."""
    pair = histogram_pair(train_col, test_col, bins)
    counts = np.stack([pair.c_train, pair.c_test]).astype(np.int64)
    n_set = counts.sum(axis=1)
    n_bin = counts.sum(axis=0)
    total = int(n_set.sum())
    mi = 0.0
    for s in range(2):
        for b in np.flatnonzero(counts[s]):
            c = int(counts[s, b])
            # integer ratio keeps independent cases at exactly log(1) = 0
            mi += c / total * math.log((c * total) / (int(n_bin[b]) * int(n_set[s])))
    return mi


def kl_divergence(pair: HistogramPair, smoothing: float = KL_SMOOTHING) -> float:
    """KL(test || train) in nats after additive smoothing."""
    p = pair.p_test + smoothing
    q = pair.p_train + smoothing
    p /= p.sum()
    q /= q.sum()
    return float(np.sum(p * np.log(p / q)))


def _half_kl2(p: np.ndarray, q: np.ndarray) -> float:
    """KL(p || (p+q)/2) in bits, written so the midpoint is never formed."""
    m = p > 0
    return float(np.sum(p[m] * np.log2(2.0 * p[m] / (p[m] + q[m]))))


def js_divergence(pair: HistogramPair) -> float:
    """Jensen-Shannon divergence, base 2, so it lies in [0, 1]."""
    p, q = pair.p_train, pair.p_test
    return 0.5 * _half_kl2(p, q) + 0.5 * _half_kl2(q, p)


def wasserstein_1d(train_col, test_col) -> float:
    """W1 between the two empirical distributions: integral of |F_a - F_b|."""
    a, b = np.sort(_sample(train_col)), np.sort(_sample(test_col))
    pooled = np.sort(np.concatenate([a, b]))
    widths = np.diff(pooled)
    cdf_a = np.searchsorted(a, pooled[:-1], side="right") / a.size
    cdf_b = np.searchsorted(b, pooled[:-1], side="right") / b.size
    return float(np.sum(np.abs(cdf_a - cdf_b) * widths))


def _stride_subsample(x: np.ndarray, cap: int) -> np.ndarray:
    if x.size <= cap:
        return x
    return x[:: math.ceil(x.size / cap)]


def median_pairwise_distance(values: np.ndarray) -> float:
    v = np.asarray(values, dtype=np.float64)
    iu = np.triu_indices(v.size, k=1)
    if iu[0].size == 0:
        return 0.0
    return float(np.median(np.abs(v[:, None] - v[None, :])[iu]))


def mmd_rbf(train_col, test_col, bandwidth: float | None = None,
            max_points: int = MMD_MAX_POINTS) -> float:
    """Biased RBF-kernel MMD; bandwidth defaults to the pooled median distance."""
    x = _stride_subsample(_sample(train_col), max_points)
    y = _stride_subsample(_sample(test_col), max_points)
    if bandwidth is None:
        bandwidth = median_pairwise_distance(np.concatenate([x, y]))
        if bandwidth == 0:
            bandwidth = 1.0
    def kmean(u, v):
        # scale differences before squaring so tiny bandwidths do not underflow
        z = (u[:, None] - v[None, :]) / bandwidth
        with np.errstate(over="ignore"):  # inf distance -> kernel value 0
            return float(np.mean(np.exp(-0.5 * z * z)))

    mmd2 = kmean(x, x) + kmean(y, y) - 2.0 * kmean(x, y)
    return math.sqrt(max(mmd2, 0.0))


def feature_metrics(train_col, test_col) -> np.ndarray:
    pair = histogram_pair(train_col, test_col)
    return np.array([
        t_test(train_col, test_col),
        ks_test(train_col, test_col),
        mutual_information(train_col, test_col),
        kl_divergence(pair),
        js_divergence(pair),
        wasserstein_1d(train_col, test_col),
        mmd_rbf(train_col, test_col),
    ])


def evaluate_split(train, test, workers: int = 1) -> MetricReport:
    train = np.asarray(train, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if train.ndim == 1:
        train = train[:, None]
    if test.ndim == 1:
        test = test[:, None]
    if train.shape[1] != test.shape[1]:
        raise DataError(
            f"feature dimension mismatch: train has {train.shape[1]}, test has {test.shape[1]}")
    if train.shape[0] < 2 or test.shape[0] < 2:
        raise DataError("each set needs at least two instances")

    cols = range(train.shape[1])
    if workers > 1 and train.shape[1] > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda j: feature_metrics(train[:, j], test[:, j]), cols))
    else:
        rows = [feature_metrics(train[:, j], test[:, j]) for j in cols]
    per_feature = np.vstack(rows)
    means = per_feature.mean(axis=0)
    return MetricReport(*(float(v) for v in means), per_feature=per_feature)
