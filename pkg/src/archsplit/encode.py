"""Turn each supported modality into an n x d float32 feature matrix.

Labels never enter the feature matrix; when present they ride along as an
opaque list of strings, one per instance.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import DataError
from .tensorfile import read_tensor

MODALITIES = ("tabular", "image", "signal", "sequence", "graph")


@dataclass
class DatasetSource:
    modality: str
    data_path: str | Path
    labels: str | Path | None = None  # label file, one label per line
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise DataError(
                f"unknown modality {self.modality!r}; expected one of {', '.join(MODALITIES)}")


@dataclass
class EncodedMatrix:
    values: np.ndarray
    feature_names: list[str] | None = None
    vocabulary: list[str] | None = None
    labels: list[str] | None = None

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DataError(f"encoded matrix must be 2-D with n >= 1 and d >= 1, got {v.shape}")
        if not np.all(np.isfinite(v)):
            bad = np.argwhere(~np.isfinite(v))[0]
            raise DataError(f"non-finite value at instance {bad[0]}, feature {bad[1]}")
        if self.labels is not None and len(self.labels) != v.shape[0]:
            raise DataError(
                f"{len(self.labels)} labels for {v.shape[0]} instances")

    @property
    def n_instances(self) -> int:
        return self.values.shape[0]


# -- text helpers ----------------------------------------------------------

def read_lines(path) -> list[str]:
    """UTF-8 lines of a file; one trailing newline is optional, CR is dropped."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def read_csv_rows(path, has_header: bool = False) -> tuple[list[str] | None, list[list[str]]]:
    lines = read_lines(path)
    rows = list(csv.reader(lines))
    header = None
    if has_header:
        if not rows:
            raise DataError(f"{path}: header requested but file is empty")
        header, rows = rows[0], rows[1:]
    return header, rows


def _resolve_column(spec, header: list[str] | None, width: int) -> int:
    if isinstance(spec, int) or (isinstance(spec, str) and spec.lstrip("-").isdigit()):
        idx = int(spec)
        if idx < 0:
            idx += width
        if not 0 <= idx < width:
            raise DataError(f"label column {spec} out of range for {width} columns")
        return idx
    if header is None or spec not in header:
        raise DataError(f"label column {spec!r} not found in header")
    return header.index(spec)


def _parse_numeric_table(path, rows: list[list[str]], skip: int | None,
                         first_line: int) -> np.ndarray:
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width - (skip is not None)), dtype=np.float32)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"{path}: line {i + first_line} has {len(row)} fields, expected {width}")
        j_out = 0
        for j, cell in enumerate(row):
            if j == skip:
                continue
            try:
                val = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric value {cell!r} at row {i}, column {j}") from None
            if not np.isfinite(val):
                raise DataError(f"{path}: non-finite value {cell!r} at row {i}, column {j}")
            out[i, j_out] = val
            j_out += 1
    return out


# -- modality encoders -----------------------------------------------------

def encode_tabular(source: DatasetSource) -> EncodedMatrix:
    has_header = bool(source.options.get("has_header", False))
    header, rows = read_csv_rows(source.data_path, has_header)
    if not rows:
        raise DataError(f"{source.data_path}: no data rows")
    width = len(rows[0])

    label_col = None
    labels = _labels_from_file(source)
    if source.options.get("label_column") is not None:
        label_col = _resolve_column(source.options["label_column"], header, width)
        labels = [r[label_col] if label_col < len(r) else "" for r in rows]

    values = _parse_numeric_table(source.data_path, rows, label_col, 1 + has_header)
    names = None
    if header is not None:
        names = [h for j, h in enumerate(header) if j != label_col]
    return EncodedMatrix(values, feature_names=names, labels=labels)


def _load_instances(path) -> list[np.ndarray] | np.ndarray:
    """A tensor file holds a batch; a directory holds one tensor per instance."""
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file())
        if not files:
            raise DataError(f"{path}: directory contains no tensor files")
        return [read_tensor(p) for p in files]
    return read_tensor(path)


def flatten_instances(items: Sequence[np.ndarray], what: str) -> np.ndarray:
    """Stack same-shaped arrays into rows, flattening in C order."""
    if len(items) == 0:
        raise DataError(f"no {what}s to encode")
    shape = np.shape(items[0])
    rows = []
    for i, item in enumerate(items):
        a = np.asarray(item, dtype=np.float32)
        if a.shape != shape:
            raise DataError(f"{what} {i} has shape {a.shape}, expected {shape}")
        rows.append(a.reshape(-1))
    return np.stack(rows)


def encode_images(images) -> np.ndarray:
    """Rows are images flattened height, then width, then channel."""
    if isinstance(images, np.ndarray):
        if images.ndim == 3:
            images = images[..., None]
        if images.ndim != 4:
            raise DataError(f"image batch must be (n, h, w[, c]), got shape {images.shape}")
        return np.ascontiguousarray(images, dtype=np.float32).reshape(images.shape[0], -1)
    items = [np.asarray(im, dtype=np.float32) for im in images]
    items = [im[..., None] if im.ndim == 2 else im for im in items]
    return flatten_instances(items, "image")


def encode_image(source: DatasetSource) -> EncodedMatrix:
    values = encode_images(_load_instances(source.data_path))
    return EncodedMatrix(values, labels=_labels_from_file(source))


def encode_signals(signals) -> np.ndarray:
    """Rows are signals flattened channel-major (all of channel 0, then channel 1...)."""
    if isinstance(signals, np.ndarray):
        if signals.ndim not in (2, 3):
            raise DataError(f"signal batch must be (n, t) or (n, c, t), got {signals.shape}")
        return np.ascontiguousarray(signals, dtype=np.float32).reshape(signals.shape[0], -1)
    return flatten_instances(signals, "signal")


def encode_signal(source: DatasetSource) -> EncodedMatrix:
    values = encode_signals(_load_instances(source.data_path))
    return EncodedMatrix(values, labels=_labels_from_file(source))


def count_characters(sequences: Sequence[str], vocabulary: Sequence[str] | None = None):
    """Bag-of-characters counts. Vocabulary defaults to the sorted distinct characters."""
    if len(sequences) == 0:
        raise DataError("no sequences to encode")
    if vocabulary is None:
        chars = set().union(*map(set, sequences))
        vocabulary = sorted(chars, key=lambda c: c.encode("utf-8"))
    vocabulary = list(vocabulary)
    if not vocabulary:
        raise DataError("all sequences are empty; nothing to encode")
    col = {c: j for j, c in enumerate(vocabulary)}
    out = np.zeros((len(sequences), len(vocabulary)), dtype=np.float32)
    for i, s in enumerate(sequences):
        for c in s:
            j = col.get(c)
            if j is not None:
                out[i, j] += 1
    return out, vocabulary


def encode_sequence(source: DatasetSource) -> EncodedMatrix:
    seqs = read_lines(source.data_path)
    values, vocab = count_characters(seqs, source.options.get("vocabulary"))
    return EncodedMatrix(values, vocabulary=vocab, labels=_labels_from_file(source))


def aggregate_graphs(node_features: np.ndarray, node_counts: Sequence[int]) -> np.ndarray:
    """Per-graph [mean, min, max, sum] of each node feature, feature-major."""
    nodes = np.asarray(node_features, dtype=np.float32)
    if nodes.ndim != 2:
        raise DataError(f"node features must be 2-D, got shape {nodes.shape}")
    counts = [int(c) for c in node_counts]
    if sum(counts) != nodes.shape[0]:
        raise DataError(
            f"node counts sum to {sum(counts)} but there are {nodes.shape[0]} node rows")
    f = nodes.shape[1]
    out = np.empty((len(counts), 4 * f), dtype=np.float32)
    start = 0
    for g, c in enumerate(counts):
        if c <= 0:
            raise DataError(f"graph {g} has no nodes")
        block = nodes[start:start + c].astype(np.float64)
        start += c
        stats = np.stack([block.mean(0), block.min(0), block.max(0), block.sum(0)], axis=1)
        out[g] = stats.reshape(-1)
    return out


def read_node_counts(path) -> list[int]:
    counts = []
    for i, ln in enumerate(read_lines(path)):
        try:
            counts.append(int(ln))
        except ValueError:
            raise DataError(f"{path}: line {i + 1}: {ln!r} is not an integer") from None
    return counts


def encode_graph(source: DatasetSource) -> EncodedMatrix:
    """Mode (a): a CSV with one pre-encoded row per instance.
    Mode (b): a node-feature tensor plus ``options['node_counts']``."""
    counts = source.options.get("node_counts")
    if counts is None:
        return encode_tabular(source)
    if not isinstance(counts, (list, tuple)):
        counts = read_node_counts(counts)
    nodes = read_tensor(source.data_path)
    if nodes.ndim != 2:
        nodes = nodes.reshape(nodes.shape[0], -1)
    return EncodedMatrix(aggregate_graphs(nodes, counts), labels=_labels_from_file(source))


def _labels_from_file(source: DatasetSource) -> list[str] | None:
    if source.labels is None:
        return None
    return read_lines(source.labels)


ENCODERS = {
    "tabular": encode_tabular,
    "image": encode_image,
    "signal": encode_signal,
    "sequence": encode_sequence,
    "graph": encode_graph,
}


def encode(source: DatasetSource) -> EncodedMatrix:
    try:
        return ENCODERS[source.modality](source)
    except FileNotFoundError as exc:
        raise DataError(f"file not found: {exc.filename}") from None
