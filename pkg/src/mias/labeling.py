"""ROI computation, class boundaries, and the ordinal misclassification cost matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

LOG_ROI_EPSILON = 1e-6

LABEL_KINDS = ("binary_top30", "binary_roi67", "multi_tertile", "multi_quartile_merged")

BINARY_CLASSES = ("negative", "positive")
MULTI_CLASSES = ("negative", "neutral", "positive")

ROI67_THRESHOLD = 0.67


class LabelError(Exception):
    pass


def roi(revenue: float, budget: float) -> float:
    if budget <= 0:
        raise LabelError(f"budget must be positive, got {budget}")
    if revenue < 0:
        raise LabelError(f"revenue must be nonnegative, got {revenue}")
    return (revenue - budget) / budget


def log_roi1(roi_value: float) -> float:
    """log(ROI + 1) regression target, epsilon-shifted so total loss stays finite."""
    return math.log(roi_value + 1.0 + LOG_ROI_EPSILON)


@dataclass(frozen=True)
class LabelSpec:
    kind: str
    thresholds: tuple[float, ...]
    classes: tuple[str, ...]
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "thresholds": list(self.thresholds),
            "classes": list(self.classes),
            "degenerate": self.degenerate,
        }


def _upper_percentile_cutoff(values: list[float], fraction_above: float) -> float:
    """Lowest value such that at most `fraction_above` of values lie strictly above.

    Values equal to the cutoff fall in the lower class.
    """
    ordered = sorted(values)
    n = len(ordered)
    k = int(math.floor(n * fraction_above))  # how many may sit strictly above
    # candidate cutoff is the (n-k)-th smallest value
    cutoff = ordered[n - k - 1] if k < n else ordered[0]
    return cutoff


def resolve_boundaries(rois: Sequence[float], spec_kind: str) -> LabelSpec:
    values = list(rois)
    if len(values) < 10:
        raise LabelError("need at least 10 movies to resolve boundaries")
    degenerate = len(set(values)) == 1
    if spec_kind == "binary_roi67":
        return LabelSpec("binary_roi67", (ROI67_THRESHOLD,), BINARY_CLASSES)
    if spec_kind == "binary_top30":
        cut = _upper_percentile_cutoff(values, 0.30)
        return LabelSpec("binary_top30", (cut,), BINARY_CLASSES, degenerate)
    if spec_kind == "multi_tertile":
        lo = _upper_percentile_cutoff(values, 2.0 / 3.0)
        hi = _upper_percentile_cutoff(values, 1.0 / 3.0)
        return LabelSpec("multi_tertile", (lo, hi), MULTI_CLASSES, degenerate)
    if spec_kind == "multi_quartile_merged":
        lo = _upper_percentile_cutoff(values, 0.75)
        hi = _upper_percentile_cutoff(values, 0.25)
        return LabelSpec("multi_quartile_merged", (lo, hi), MULTI_CLASSES, degenerate)
    raise LabelError(f"unknown label spec kind {spec_kind!r}")


def label_one(roi_value: float, spec: LabelSpec) -> str:
    """Class of one ROI; ties at a threshold go to the lower class."""
    if len(spec.thresholds) == 1:
        if spec.kind == "binary_roi67":
            return "positive" if roi_value >= spec.thresholds[0] else "negative"
        return "positive" if roi_value > spec.thresholds[0] else "negative"
    lo, hi = spec.thresholds
    if roi_value > hi:
        return "positive"
    if roi_value > lo:
        return "neutral"
    return "negative"


def label(rois: Sequence[float], spec: LabelSpec) -> list[str]:
    return [label_one(r, spec) for r in rois]


@dataclass(frozen=True)
class CostMatrix:
    """Rows = actual class, columns = predicted class, zero diagonal."""

    classes: tuple[str, ...]
    costs: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.classes)
        if len(self.costs) != n or any(len(r) != n for r in self.costs):
            raise LabelError("cost matrix shape mismatch")
        if any(self.costs[i][i] != 0 for i in range(n)):
            raise LabelError("cost matrix diagonal must be zero")
        if any(c < 0 for row in self.costs for c in row):
            raise LabelError("costs must be nonnegative")

    def cost(self, actual: str, predicted: str) -> float:
        i = self.classes.index(actual)
        j = self.classes.index(predicted)
        return self.costs[i][j]


def default_cost_matrix() -> CostMatrix:
    """Ordinal 3-class penalties: 1 per class step, 2 for a two-step miss."""
    return CostMatrix(
        classes=MULTI_CLASSES,
        costs=((0.0, 1.0, 2.0), (1.0, 0.0, 1.0), (2.0, 1.0, 0.0)),
    )


def total_cost(actual: Sequence[str], predicted: Sequence[str], cm: CostMatrix) -> float:
    if len(actual) != len(predicted):
        raise LabelError("actual/predicted length mismatch")
    return sum(cm.cost(a, p) for a, p in zip(actual, predicted))
