import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mias.labeling import (
    CostMatrix,
    LabelError,
    default_cost_matrix,
    label,
    label_one,
    log_roi1,
    resolve_boundaries,
    roi,
    total_cost,
)


def test_roi():
    assert roi(2_000_000, 1_000_000) == 1.0
    assert roi(500_000, 1_000_000) == -0.5
    with pytest.raises(LabelError):
        roi(1.0, 0)


def test_log_roi1():
    assert log_roi1(0.0) == pytest.approx(math.log(1.0 + 1e-6))
    assert log_roi1(math.e - 1.0 - 1e-6) == pytest.approx(1.0)
    # defined for total losses (roi = -1)
    assert math.isfinite(log_roi1(-1.0))


def test_binary_top30_cutoff_example():
    rois = list(map(float, range(1, 11)))  # 1..10, top 30% = {8, 9, 10}
    spec = resolve_boundaries(rois, "binary_top30")
    labels = label(rois, spec)
    assert labels.count("positive") == 3
    assert [r for r, l in zip(rois, labels) if l == "positive"] == [8.0, 9.0, 10.0]


def test_ties_at_cutoff_go_to_lower_class():
    rois = [1.0] * 7 + [7.0, 7.0, 7.0]
    spec = resolve_boundaries(rois, "binary_top30")
    labels = label(rois, spec)
    assert labels.count("positive") == 3
    rois = [1, 2, 3, 4, 5, 6, 7, 7, 7, 10]
    labels = label(rois, resolve_boundaries(rois, "binary_top30"))
    # cutoff sits on the tied value: ties drop to the lower class
    assert labels.count("positive") == 1


def test_binary_roi67_fixed_threshold():
    rois = [0.0, 0.5, 0.66, 0.67, 0.68, 2.0] + [0.1] * 4
    spec = resolve_boundaries(rois, "binary_roi67")
    labels = label(rois, spec)
    assert [l == "positive" for l in labels[:6]] == [
        False, False, False, True, True, True
    ]


def test_multi_tertile_even_split():
    rois = list(map(float, range(1, 13)))  # 12 distinct values -> 4/4/4
    spec = resolve_boundaries(rois, "multi_tertile")
    labels = label(rois, spec)
    assert labels.count("negative") == 4
    assert labels.count("neutral") == 4
    assert labels.count("positive") == 4
    assert labels[0] == "negative" and labels[-1] == "positive"


def test_multi_quartile_merged():
    rois = list(map(float, range(1, 13)))
    spec = resolve_boundaries(rois, "multi_quartile_merged")
    labels = label(rois, spec)
    # middle two quartiles merge into neutral
    assert labels.count("negative") == 3
    assert labels.count("neutral") == 6
    assert labels.count("positive") == 3


def test_degenerate_all_equal():
    rois = [1.0] * 12
    spec = resolve_boundaries(rois, "multi_tertile")
    assert spec.degenerate
    assert set(label(rois, spec)) == {"negative"}


def test_needs_enough_movies():
    with pytest.raises(LabelError):
        resolve_boundaries([1.0] * 9, "binary_top30")


def test_unknown_kind():
    with pytest.raises(LabelError):
        resolve_boundaries([float(i) for i in range(10)], "nope")


def test_label_one_consistent_with_label():
    rois = [float(i) for i in range(20)]
    spec = resolve_boundaries(rois, "multi_tertile")
    assert label(rois, spec) == [label_one(r, spec) for r in rois]


@given(st.lists(st.floats(-0.99, 50.0), min_size=10, max_size=60, unique=True))
def test_top30_positive_count_property(rois):
    spec = resolve_boundaries(rois, "binary_top30")
    labels = label(rois, spec)
    # with unique values, exactly floor(0.3 n) land above the cutoff
    assert labels.count("positive") == int(math.floor(0.3 * len(rois)))


def test_cost_matrix_values():
    cm = default_cost_matrix()
    assert cm.classes == ("negative", "neutral", "positive")
    assert cm.cost("negative", "negative") == 0.0
    assert cm.cost("negative", "positive") == 2.0
    assert cm.cost("positive", "negative") == 2.0
    assert cm.cost("negative", "neutral") == 1.0
    assert cm.cost("neutral", "negative") == 1.0
    assert cm.cost("neutral", "positive") == 1.0
    assert cm.cost("positive", "neutral") == 1.0


def test_cost_matrix_validation():
    with pytest.raises(LabelError):
        CostMatrix(classes=("a", "b"), costs=((1.0, 1.0), (1.0, 0.0)))  # nonzero diag
    with pytest.raises(LabelError):
        CostMatrix(classes=("a", "b"), costs=((0.0, -1.0), (1.0, 0.0)))


def test_total_cost():
    cm = default_cost_matrix()
    actual = ["negative", "neutral", "positive"]
    predicted = ["positive", "neutral", "negative"]
    assert total_cost(actual, predicted, cm) == 4.0
    assert total_cost(actual, actual, cm) == 0.0
