"""Command line interface: ``archsplit split | evaluate | compare``.

Exit status is 0 on success, 2 for bad arguments and 1 for unreadable or
inconsistent data.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import report as rpt
from .assign import partition_matrix
from .encode import (MODALITIES, DatasetSource, EncodedMatrix, count_characters, encode,
                     read_lines, read_node_counts)
from .errors import ConfigError, DataError
from .harness import sweep
from .nmf import NmfConfig
from .splitmetrics import evaluate_split
from .tensorfile import read_tensor, write_tensor


def _fraction(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < val < 1:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1, got {text}")
    return val


def _fraction_list(text: str) -> list[float]:
    return [_fraction(t) for t in text.split(",") if t.strip()]


def _positive_int(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return val


def _seed_count(text: str) -> int:
    val = int(text)
    if val < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 seeds, got {text}")
    return val


def _add_nmf_flags(p: argparse.ArgumentParser) -> None:
    d = NmfConfig()
    p.add_argument("--max-iter", type=_positive_int, default=d.max_iterations)
    p.add_argument("--tol", type=float, default=d.tolerance)
    p.add_argument("--seed", type=int, default=d.seed)


def _add_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--modality", required=True, choices=MODALITIES)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--has-header", action="store_true",
                   help="first CSV line holds column names")
    labels = p.add_mutually_exclusive_group()
    labels.add_argument("--labels", type=Path, help="label file, one label per line")
    labels.add_argument("--label-column", help="CSV column (index or header name) holding labels")
    p.add_argument("--node-counts", type=Path,
                   help="graph modality: nodes per graph, one integer per line")


def _threads_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="archsplit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("split", help="partition a dataset into train and test sets")
    _add_source_flags(sp)
    sp.add_argument("--fraction", required=True, type=_fraction)
    sp.add_argument("--indices-only", action="store_true")
    sp.add_argument("--out-dir", type=Path, default=Path("."))
    sp.add_argument("--report", type=Path, help="also write a JSON report with the index lists")
    sp.add_argument("--batch-size", type=_positive_int)
    _add_nmf_flags(sp)
    _threads_flag(sp)

    ev = sub.add_parser("evaluate", help="compare a train file against a test file")
    ev.add_argument("--modality", required=True, choices=MODALITIES)
    ev.add_argument("--train", required=True, type=Path)
    ev.add_argument("--test", required=True, type=Path)
    ev.add_argument("--out", required=True, type=Path)
    ev.add_argument("--has-header", action="store_true")
    ev.add_argument("--label-column")
    ev.add_argument("--train-node-counts", type=Path)
    ev.add_argument("--test-node-counts", type=Path)
    _threads_flag(ev)

    cp = sub.add_parser("compare", help="archetypal split versus random splits")
    _add_source_flags(cp)
    frac = cp.add_mutually_exclusive_group(required=True)
    frac.add_argument("--fraction", type=_fraction)
    frac.add_argument("--fractions", type=_fraction_list, help="comma-separated list")
    cp.add_argument("--seeds", type=_seed_count, default=20, help="number of random splits")
    cp.add_argument("--out", required=True, type=Path)
    cp.add_argument("--include-indices", action="store_true")
    _add_nmf_flags(cp)
    _threads_flag(cp)
    return parser


def _source(args) -> DatasetSource:
    opts = {"has_header": args.has_header, "label_column": args.label_column}
    if args.node_counts is not None:
        if args.modality != "graph":
            raise ConfigError("--node-counts only applies to --modality graph")
        opts["node_counts"] = args.node_counts
    return DatasetSource(args.modality, args.input, labels=args.labels, options=opts)


def _config(args) -> NmfConfig:
    if not args.tol > 0:
        raise ConfigError(f"--tol must be positive, got {args.tol}")
    return NmfConfig(max_iterations=args.max_iter, tolerance=args.tol, seed=args.seed)


def _write_indices(path: Path, idx) -> None:
    path.write_text("".join(f"{int(i)}\n" for i in idx), encoding="ascii")


def _write_lines(path: Path, lines) -> None:
    path.write_text("".join(f"{ln}\n" for ln in lines), encoding="utf-8")


def _write_partitioned(args, enc: EncodedMatrix, parts: dict[str, np.ndarray]) -> None:
    out = args.out_dir
    text_input = args.modality in ("tabular", "sequence") or (
        args.modality == "graph" and args.node_counts is None)
    if text_input:
        lines = read_lines(args.input)
        header = None
        if args.modality != "sequence" and args.has_header:
            header, lines = lines[0], lines[1:]
        ext = "txt" if args.modality == "sequence" else "csv"
        for name, idx in parts.items():
            rows = [lines[i] for i in idx]
            _write_lines(out / f"{name}.{ext}", ([header] if header is not None else []) + rows)
    elif args.modality == "graph":
        nodes = read_tensor(args.input)
        counts = read_node_counts(args.node_counts)
        starts = np.concatenate([[0], np.cumsum(counts)])
        for name, idx in parts.items():
            block = np.concatenate([nodes[starts[g]:starts[g + 1]] for g in idx])
            write_tensor(out / f"{name}.bmt", block)
            _write_lines(out / f"{name}_node_counts.csv", [counts[g] for g in idx])
    else:
        if args.input.is_dir():
            files = sorted(p for p in args.input.iterdir() if p.is_file())
            data = np.stack([read_tensor(p) for p in files])
        else:
            data = read_tensor(args.input)
        for name, idx in parts.items():
            write_tensor(out / f"{name}.bmt", data[idx])
    if enc.labels is not None:
        for name, idx in parts.items():
            _write_lines(out / f"{name}_labels.csv", [enc.labels[i] for i in idx])


def cmd_split(args) -> int:
    source = _source(args)
    config = _config(args)
    enc = encode(source)
    trace = partition_matrix(enc.values, args.fraction, config,
                             batch_size=args.batch_size, workers=args.threads,
                             return_trace=True)
    part = trace.partition
    args.out_dir.mkdir(parents=True, exist_ok=True)
    _write_indices(args.out_dir / "train_indices.csv", part.train_indices)
    _write_indices(args.out_dir / "test_indices.csv", part.test_indices)
    if not args.indices_only:
        _write_partitioned(args, enc, {"train": part.train_indices, "test": part.test_indices})
    if args.report is not None:
        n, d = enc.values.shape
        meta = {
            "modality": args.modality,
            "input": str(args.input),
            "fraction": args.fraction,
            "n": n,
            "d": d,
            "k": part.k,
            "seed": config.seed,
            "config": rpt.config_dict(config),
            "iterations_run": trace.factors.iterations_run,
            "converged": trace.factors.converged,
        }
        if enc.vocabulary is not None:
            meta["vocabulary"] = enc.vocabulary
        rpt.write_report(args.report, rpt.build_report("split", meta, rpt.partition_dict(part)))
    n, d = enc.values.shape
    print(f"n={n} d={d} k={part.k}")
    return 0


def _encode_pair(args) -> tuple[EncodedMatrix, EncodedMatrix, list[str] | None]:
    if args.modality == "sequence":
        a, b = read_lines(args.train), read_lines(args.test)
        values, vocab = count_characters(a + b)
        return (EncodedMatrix(values[: len(a)], vocabulary=vocab),
                EncodedMatrix(values[len(a):], vocabulary=vocab), vocab)
    encs = []
    for path, counts in ((args.train, args.train_node_counts),
                         (args.test, args.test_node_counts)):
        opts = {"has_header": args.has_header, "label_column": args.label_column}
        if counts is not None:
            opts["node_counts"] = counts
        encs.append(encode(DatasetSource(args.modality, path, options=opts)))
    return encs[0], encs[1], None


def cmd_evaluate(args) -> int:
    for p in (args.train, args.test):
        if not p.exists():
            raise DataError(f"file not found: {p}")
    train, test, vocab = _encode_pair(args)
    result = evaluate_split(train.values, test.values, workers=args.threads)
    meta = {
        "modality": args.modality,
        "train": str(args.train),
        "test": str(args.test),
        "n_train": train.n_instances,
        "n_test": test.n_instances,
        "d": train.values.shape[1],
    }
    if vocab is not None:
        meta["vocabulary"] = vocab
    rpt.write_report(args.out, rpt.build_report(
        "evaluate", meta, rpt.metric_report_dict(result, train.feature_names)))
    agg = result.as_dict()
    print(" ".join(f"{k}={v:.4g}" for k, v in agg.items()))
    return 0


def cmd_compare(args) -> int:
    fractions = [args.fraction] if args.fraction is not None else args.fractions
    if not fractions:
        raise ConfigError("--fractions is empty")
    config = _config(args)
    enc = encode(_source(args))
    reports = sweep(enc, fractions, n_seeds=args.seeds, config=config, workers=args.threads)
    meta = {
        "modality": args.modality,
        "input": str(args.input),
        "n": enc.n_instances,
        "d": enc.values.shape[1],
        "fractions": fractions,
        "n_seeds": args.seeds,
        "config": rpt.config_dict(config),
    }
    if enc.vocabulary is not None:
        meta["vocabulary"] = enc.vocabulary
    result = [rpt.comparison_dict(c, args.include_indices, enc.feature_names) for c in reports]
    rpt.write_report(args.out, rpt.build_report("compare", meta, result))
    for c in reports:
        print(f"fraction={c.fraction} k={c.partition.k} "
              f"js={c.benchmake.js:.4g} random_js={c.random_mean['js']:.4g}")
    return 0


COMMANDS = {"split": cmd_split, "evaluate": cmd_evaluate, "compare": cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"archsplit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError, UnicodeDecodeError) as exc:
        print(f"archsplit {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
