"""10-fold cross-validation harness: stratified splits, AUC suite, cost reporting."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .features import FeatureSchema
from .labeling import CostMatrix, LabelSpec, label, resolve_boundaries, total_cost
from .learners import cost_sensitive_predict, train_classifier
from .learners.regression import LassoFit, RidgeFit, fit_lasso, fit_ridge

FEATURE_SETS = ("full", "without_new", "benchmark1", "benchmark2")


class EvaluationError(Exception):
    pass


def kfold_split(labels: Sequence[str], k: int, seed: int) -> np.ndarray:
    """Stratified fold assignment; falls back to unstratified when a class < k."""
    n = len(labels)
    if k < 2:
        raise EvaluationError("k must be >= 2")
    if n < k:
        raise EvaluationError("fewer rows than folds")
    rng = np.random.default_rng(seed)
    folds = np.empty(n, dtype=np.int64)
    by_class: dict[str, list[int]] = {}
    for i, y in enumerate(labels):
        by_class.setdefault(y, []).append(i)
    if any(len(idx) < k for idx in by_class.values()):
        warnings.warn("class with fewer members than folds; unstratified split")
        perm = rng.permutation(n)
        for pos, i in enumerate(perm):
            folds[i] = pos % k
        return folds
    offset = 0
    for y in sorted(by_class):
        idx = np.array(by_class[y])
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            folds[i] = (pos + offset) % k
        offset += len(idx)  # stagger so remainders spread over folds
    return folds


def auc_binary(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 * P(tie)."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    if not pos or not neg:
        raise EvaluationError("AUC undefined with a single class")
    # rank-based computation, ties get the midrank
    all_scores = np.array(list(pos) + list(neg), dtype=np.float64)
    order = np.argsort(all_scores, kind="mergesort")
    ranks = np.empty(len(all_scores))
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and all_scores[order[j + 1]] == all_scores[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    pos_rank_sum = ranks[: len(pos)].sum()
    n_pos, n_neg = len(pos), len(neg)
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auc_weighted_multiclass(probas: np.ndarray, labels: Sequence[str], classes: Sequence[str]) -> float:
    """Prevalence-weighted mean of one-vs-all AUCs using P(c|x) as score."""
    labels = list(labels)
    present = [c for c in classes if c in labels]
    if len(present) < 2:
        raise EvaluationError("need >= 2 classes present")
    if len(present) < len(classes):
        warnings.warn("class absent from labels; weights renormalized")
    total_weight = 0.0
    acc = 0.0
    for c in present:
        j = list(classes).index(c)
        ybin = [1 if y == c else 0 for y in labels]
        weight = sum(ybin) / len(labels)
        acc += weight * auc_binary(probas[:, j], ybin)
        total_weight += weight
    return acc / total_weight


def rmse(pred: Sequence[float], actual: Sequence[float]) -> float:
    if len(pred) != len(actual) or len(pred) == 0:
        raise EvaluationError("rmse needs equal nonempty lengths")
    diffs = np.asarray(pred, dtype=np.float64) - np.asarray(actual, dtype=np.float64)
    return float(np.sqrt(np.mean(diffs**2)))


def _precision_recall(actual: list[str], predicted: list[str], cls: str) -> tuple[float, float]:
    tp = sum(1 for a, p in zip(actual, predicted) if a == cls and p == cls)
    fp = sum(1 for a, p in zip(actual, predicted) if a != cls and p == cls)
    fn = sum(1 for a, p in zip(actual, predicted) if a == cls and p != cls)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return precision, recall


@dataclass
class EvalReport:
    spec: LabelSpec
    model_kind: str
    model_config: dict
    feature_set: str
    seed: int
    metrics: dict = field(default_factory=dict)
    per_fold: list[dict] = field(default_factory=list)
    skipped_folds: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "model_kind": self.model_kind,
            "model_config": self.model_config,
            "feature_set": self.feature_set,
            "seed": self.seed,
            "metrics": self.metrics,
            "per_fold": self.per_fold,
            "skipped_folds": self.skipped_folds,
        }


def run_experiment(
    matrix: np.ndarray,
    rois: Sequence[float],
    schema: FeatureSchema,
    spec_kind: str,
    model_kind: str,
    model_config: dict | None = None,
    feature_set: str = "full",
    k: int = 10,
    seed: int = 0,
    cost_matrix: CostMatrix | None = None,
    threshold_mode: str = "full",
) -> EvalReport:
    """One cell of the evaluation grid: k-fold CV of one model on one feature set.

    threshold_mode 'full' resolves label boundaries on the whole dataset before
    CV (the shipped protocol); 'fold_local' re-resolves on training rows only to
    quantify the leakage of the former.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape[0] != len(rois):
        raise EvaluationError("row count mismatch between matrix and rois")
    model_config = model_config or {}
    cols = schema.select(feature_set)
    X = matrix[:, cols]
    full_spec = resolve_boundaries(rois, spec_kind)
    y_full = label(rois, full_spec)
    classes = full_spec.classes
    folds = kfold_split(y_full, k, seed)

    report = EvalReport(
        spec=full_spec,
        model_kind=model_kind,
        model_config=model_config,
        feature_set=feature_set,
        seed=seed,
    )
    multiclass = len(classes) > 2
    fold_metrics: list[dict] = []
    for f in range(k):
        test = np.flatnonzero(folds == f)
        train = np.flatnonzero(folds != f)
        if threshold_mode == "fold_local" and full_spec.kind != "binary_roi67":
            spec = resolve_boundaries([rois[i] for i in train], spec_kind)
        else:
            spec = full_spec
        y_train = label([rois[i] for i in train], spec)
        y_test = label([rois[i] for i in test], spec)
        if len(set(y_train)) < 2 or len(set(y_test)) < 2:
            warnings.warn(f"fold {f} skipped: single class after split")
            report.skipped_folds.append(f)
            continue
        clf = train_classifier(model_kind, X[train], y_train, model_config,
                               seed=seed + f, classes=classes)
        probas = clf.predict_proba(X[test])
        predicted = [clf.classes[i] for i in probas.argmax(axis=1)]
        entry: dict = {"fold": f, "n_test": len(test)}
        if multiclass:
            entry["auc"] = auc_weighted_multiclass(probas, y_test, clf.classes)
        else:
            j = clf.classes.index("positive")
            entry["auc"] = auc_binary(probas[:, j], [1 if y == "positive" else 0 for y in y_test])
        entry["accuracy"] = sum(a == p for a, p in zip(y_test, predicted)) / len(y_test)
        entry["precision_pos"], entry["recall_pos"] = _precision_recall(y_test, predicted, "positive")
        entry["precision_neg"], entry["recall_neg"] = _precision_recall(y_test, predicted, "negative")
        if multiclass:
            cm = cost_matrix or _default_cm()
            cs_pred = cost_sensitive_predict(probas, clf.classes, cm)
            entry["total_cost"] = total_cost(y_test, cs_pred, cm)
            entry["argmax_cost"] = total_cost(y_test, predicted, cm)
        fold_metrics.append(entry)

    if not fold_metrics:
        raise EvaluationError("every fold was skipped")
    report.per_fold = fold_metrics
    rates = ["auc", "accuracy", "precision_pos", "recall_pos", "precision_neg", "recall_neg"]
    for key in rates:
        report.metrics[key] = float(np.mean([e[key] for e in fold_metrics]))
    if multiclass:
        report.metrics["total_cost"] = float(sum(e["total_cost"] for e in fold_metrics))
        report.metrics["argmax_cost"] = float(sum(e["argmax_cost"] for e in fold_metrics))
    return report


def _default_cm() -> CostMatrix:
    from .labeling import default_cost_matrix

    return default_cost_matrix()


def run_regression_cv(
    matrix: np.ndarray,
    targets: Sequence[float],
    schema: FeatureSchema,
    kind: str,
    lam: float,
    feature_set: str = "full",
    k: int = 10,
    seed: int = 0,
) -> dict:
    """k-fold RMSE of a lasso/ridge regressor on log(ROI+1) targets."""
    matrix = np.asarray(matrix, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    cols = schema.select(feature_set)
    X = matrix[:, cols]
    rng = np.random.default_rng(seed)
    folds = rng.permutation(len(y)) % k
    per_fold = []
    for f in range(k):
        test = np.flatnonzero(folds == f)
        train = np.flatnonzero(folds != f)
        if kind == "lasso":
            fit = fit_lasso(X[train], y[train], lam)
        elif kind == "ridge":
            fit = fit_ridge(X[train], y[train], lam)
        else:
            raise EvaluationError(f"unknown regressor kind {kind!r}")
        per_fold.append(rmse(fit.predict(X[test]), y[test]))
    return {"kind": kind, "lambda": lam, "rmse": float(np.mean(per_fold)), "per_fold": per_fold}


def coefficient_report(fit: LassoFit, schema: FeatureSchema, top_k: int = 5) -> dict:
    """Nonzero-coefficient counts by group/new tag plus top +/- coefficient tables."""
    by_name = {c.name: c for c in schema.columns}
    nonzero = [(n, c) for n, c in fit.coefficients.items() if c != 0.0]
    group_counts: dict[str, int] = {}
    new_count = 0
    for n, _ in nonzero:
        col = by_name.get(n)
        group = col.group if col else "unknown"
        group_counts[group] = group_counts.get(group, 0) + 1
        if col and col.is_new:
            new_count += 1

    def table(entries):
        return [
            {
                "name": n,
                "coefficient": c,
                "std_coefficient": fit.std_coefficients.get(n, 0.0),
                "group": by_name[n].group if n in by_name else "unknown",
                "is_new": by_name[n].is_new if n in by_name else False,
            }
            for n, c in entries
        ]

    positives = sorted((e for e in nonzero if e[1] > 0), key=lambda e: -e[1])[:top_k]
    negatives = sorted((e for e in nonzero if e[1] < 0), key=lambda e: e[1])[:top_k]
    return {
        "nonzero_total": len(nonzero),
        "nonzero_by_group": group_counts,
        "nonzero_new": new_count,
        "positive_count": sum(1 for _, c in nonzero if c > 0),
        "negative_count": sum(1 for _, c in nonzero if c < 0),
        "top_positive": table(positives),
        "top_negative": table(negatives),
    }


def pearson(x: Sequence[float], y: Sequence[float]) -> float | None:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.std() == 0 or y.std() == 0:
        return None
    return float(np.corrcoef(x, y)[0, 1])


def _ranks(values: Sequence[float]) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    order = np.argsort(arr, kind="mergesort")
    ranks = np.empty(len(arr))
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float | None:
    return pearson(_ranks(x), _ranks(y))


def diagnostics_report(
    corpus,
    schema: FeatureSchema,
    ids: list[str],
    matrix: np.ndarray,
    rois: Sequence[float],
    feature_columns: Sequence[str] = ("ad_collab_profit", "hybrid_age", "net_delta_avg_path"),
    top_k: int = 10,
    histogram_bins: int = 20,
) -> dict:
    """Dataset-level sanity numbers: revenue/ROI decoupling, rank correlations,
    top actor lists, ROI histogram."""
    import math as _math

    from .labeling import log_roi1

    movies = [corpus.movie(mid) for mid in ids]
    revenues = [float(m.revenue_usd or 0) for m in movies]
    log_targets = [log_roi1(r) for r in rois]
    name_to_idx = {n: i for i, n in enumerate(schema.names)}
    correlations = {}
    for col in feature_columns:
        if col not in name_to_idx:
            continue
        vals = matrix[:, name_to_idx[col]]
        correlations[col] = {
            "pearson": pearson(vals, log_targets),
            "spearman": spearman(vals, log_targets),
        }

    # actor totals over the experiment movies
    totals_rev: dict[str, float] = {}
    totals_profit: dict[str, float] = {}
    for m in movies:
        if m.revenue_usd is None:
            continue
        profit = (m.revenue_usd - m.budget_usd) if m.budget_usd else None
        for pid in m.cast:
            totals_rev[pid] = totals_rev.get(pid, 0.0) + m.revenue_usd
            if profit is not None:
                totals_profit[pid] = totals_profit.get(pid, 0.0) + profit
    shared = sorted(set(totals_rev) & set(totals_profit))
    rank_corr = (
        spearman([totals_rev[p] for p in shared], [totals_profit[p] for p in shared])
        if len(shared) >= 3 else None
    )

    def top_list(totals: dict[str, float]) -> list[dict]:
        ranked = sorted(totals.items(), key=lambda e: (-e[1], e[0]))[:top_k]
        return [{"person_id": pid, "name": corpus.person_name(pid), "total": v} for pid, v in ranked]

    counts, edges = np.histogram(np.asarray(rois, dtype=np.float64), bins=histogram_bins)
    return {
        "pearson_revenue_roi": pearson(revenues, rois),
        "feature_correlations": correlations,
        "spearman_actor_gross_vs_profit": rank_corr,
        "top_actors_by_revenue": top_list(totals_rev),
        "top_actors_by_profit": top_list(totals_profit),
        "roi_histogram": {"counts": counts.tolist(), "edges": edges.tolist()},
    }
