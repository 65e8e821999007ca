"""JSON report files.

Keys are written in a fixed order (the insertion order below), two-space
indented, with a trailing newline, so identical runs produce identical bytes
and ``dumps(loads(text)) == text``.

Top level::

    {"schema_version": "1", "command": ..., "metadata": {...}, "result": {...}}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .assign import Partition
from .harness import ComparisonReport
from .nmf import NmfConfig
from .splitmetrics import METRIC_NAMES, MetricReport

SCHEMA_VERSION = "1"


def config_dict(config: NmfConfig) -> dict[str, Any]:
    return {
        "max_iterations": config.max_iterations,
        "tolerance": config.tolerance,
        "epsilon": config.epsilon,
        "seed": config.seed,
        "init_scale": config.init_scale,
    }


def metric_report_dict(report: MetricReport, feature_names=None) -> dict[str, Any]:
    per_feature = []
    for j, row in enumerate(report.per_feature):
        entry: dict[str, Any] = {"feature": feature_names[j] if feature_names else j}
        entry.update({name: float(v) for name, v in zip(METRIC_NAMES, row)})
        per_feature.append(entry)
    return {"aggregate": report.as_dict(), "per_feature": per_feature}


def partition_dict(part: Partition) -> dict[str, Any]:
    return {
        "k": part.k,
        "test_indices": [int(i) for i in part.test_indices],
        "train_indices": [int(i) for i in part.train_indices],
    }


def comparison_dict(cmp: ComparisonReport, include_indices: bool = False,
                    feature_names=None) -> dict[str, Any]:
    out: dict[str, Any] = {
        "fraction": cmp.fraction,
        "k": cmp.partition.k,
        "benchmake": metric_report_dict(cmp.benchmake, feature_names),
        "random_mean": dict(cmp.random_mean),
        "random_std": dict(cmp.random_std),
        "seeds": list(cmp.seeds),
    }
    if include_indices:
        out["test_indices"] = [int(i) for i in cmp.partition.test_indices]
    return out


def build_report(command: str, metadata: dict[str, Any], result: Any) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "metadata": metadata,
        "result": result,
    }


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def loads(text: str) -> dict[str, Any]:
    return json.loads(text)


def write_report(path, report: dict[str, Any]) -> None:
    Path(path).write_text(dumps(report), encoding="utf-8")


def read_report(path) -> dict[str, Any]:
    return loads(Path(path).read_text(encoding="utf-8"))
