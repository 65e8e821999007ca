import json

import numpy as np
from hypothesis import given
import hypothesis.strategies as st

from archsplit import report as rpt
from archsplit.harness import compare
from archsplit.synthetic import gaussian_table


def test_comparison_roundtrip_bytes():
    cmp = compare(gaussian_table(40, 3), 0.25, n_seeds=3, workers=1)
    doc = rpt.build_report("compare", {"fractions": [0.25]},
                           [rpt.comparison_dict(cmp, include_indices=True)])
    text = rpt.dumps(doc)
    assert rpt.dumps(rpt.loads(text)) == text
    assert list(doc) == ["schema_version", "command", "metadata", "result"]
    entry = doc["result"][0]
    assert list(entry) == ["fraction", "k", "benchmake", "random_mean", "random_std", "seeds",
                           "test_indices"]
    assert list(entry["benchmake"]["aggregate"]) == ["t_p", "ks_p", "mi", "kl", "js",
                                                     "wasserstein", "mmd"]


@given(st.floats(allow_nan=False, allow_infinity=False), st.lists(st.integers(0, 10 ** 6)))
def test_float_roundtrip(x, idx):
    doc = rpt.build_report("split", {"fraction": x}, {"test_indices": idx})
    text = rpt.dumps(doc)
    assert rpt.dumps(rpt.loads(text)) == text
    assert json.loads(text)["metadata"]["fraction"] == x
