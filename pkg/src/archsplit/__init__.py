"""Deterministic archetypal train/test partitioning and split diagnostics."""
from .assign import (DistanceMatrix, Partition, batched_distances, match_archetypes,
                     partition, partition_matrix, holdout_count)
from .canonical import CanonicalOrder, ScaledMatrix, canonical_order, min_max_scale, row_digest
from .encode import DatasetSource, EncodedMatrix, encode
from .errors import ArchsplitError, ConfigError, DataError
from .harness import ComparisonReport, compare, random_split, sweep
from .nmf import FactorPair, NmfConfig, factorize, init_factors, update_step
from .splitmetrics import METRIC_NAMES, HistogramPair, MetricReport, evaluate_split

__version__ = "0.1.0"
