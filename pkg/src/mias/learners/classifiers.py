"""Native classifier menu: logistic, Gaussian NB, pruned tree, random forest, LogitBoost."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..labeling import CostMatrix
from . import _tree

CLASSIFIER_KINDS = ("logistic", "naive_bayes", "decision_tree", "random_forest", "logitboost")

DEFAULT_FOREST_TREES = 200


class ClassifierError(Exception):
    pass


def _encode_labels(y: Sequence[str], classes: Sequence[str] | None) -> tuple[tuple[str, ...], np.ndarray]:
    present = sorted(set(y))
    if classes is None:
        classes = present
    else:
        classes = [c for c in classes if c in present]
    if len(classes) < 2:
        raise ClassifierError("need at least 2 classes present in y")
    index = {c: i for i, c in enumerate(classes)}
    return tuple(classes), np.array([index[v] for v in y], dtype=np.int64)


class Classifier:
    kind: str
    classes: tuple[str, ...]

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X: np.ndarray) -> list[str]:
        probas = self.predict_proba(X)
        return [self.classes[i] for i in probas.argmax(axis=1)]

    def to_params(self) -> dict:
        raise NotImplementedError


class LogisticClassifier(Classifier):
    """Multinomial logistic regression, L2-penalized, full-batch gradient descent."""

    kind = "logistic"

    def __init__(self, classes, weights, intercepts, means, stds):
        self.classes = tuple(classes)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.intercepts = np.asarray(intercepts, dtype=np.float64)
        self.means = np.asarray(means, dtype=np.float64)
        self.stds = np.asarray(stds, dtype=np.float64)

    @classmethod
    def fit(cls, X, y_enc, classes, l2=1e-3, learning_rate=0.5, iterations=500):
        X = np.asarray(X, dtype=np.float64)
        n, d = X.shape
        means = X.mean(axis=0)
        stds = X.std(axis=0)
        stds[stds == 0] = 1.0
        Z = (X - means) / stds
        k = len(classes)
        W = np.zeros((d, k))
        b = np.zeros(k)
        Y = np.zeros((n, k))
        Y[np.arange(n), y_enc] = 1.0
        for _ in range(iterations):
            scores = Z @ W + b
            scores -= scores.max(axis=1, keepdims=True)
            exps = np.exp(scores)
            P = exps / exps.sum(axis=1, keepdims=True)
            grad_w = Z.T @ (P - Y) / n + l2 * W
            grad_b = (P - Y).mean(axis=0)
            W -= learning_rate * grad_w
            b -= learning_rate * grad_b
        return cls(classes, W, b, means, stds)

    def predict_proba(self, X):
        Z = (np.asarray(X, dtype=np.float64) - self.means) / self.stds
        scores = Z @ self.weights + self.intercepts
        scores -= scores.max(axis=1, keepdims=True)
        exps = np.exp(scores)
        return exps / exps.sum(axis=1, keepdims=True)

    def to_params(self):
        return {
            "weights": self.weights.tolist(),
            "intercepts": self.intercepts.tolist(),
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
        }

    @classmethod
    def from_params(cls, classes, p):
        return cls(classes, p["weights"], p["intercepts"], p["means"], p["stds"])


class GaussianNBClassifier(Classifier):
    kind = "naive_bayes"

    def __init__(self, classes, priors, means, variances):
        self.classes = tuple(classes)
        self.priors = np.asarray(priors, dtype=np.float64)
        self.means = np.asarray(means, dtype=np.float64)
        self.variances = np.asarray(variances, dtype=np.float64)

    @classmethod
    def fit(cls, X, y_enc, classes):
        X = np.asarray(X, dtype=np.float64)
        k = len(classes)
        eps = 1e-9 * max(X.var(axis=0).max(), 1e-12)
        priors, means, variances = [], [], []
        for c in range(k):
            rows = X[y_enc == c]
            priors.append(len(rows) / len(X))
            means.append(rows.mean(axis=0))
            variances.append(rows.var(axis=0) + eps)
        return cls(classes, priors, means, variances)

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        log_p = np.log(self.priors)[None, :] + np.stack(
            [
                -0.5 * (np.log(2 * np.pi * self.variances[c])
                        + (X - self.means[c]) ** 2 / self.variances[c]).sum(axis=1)
                for c in range(len(self.classes))
            ],
            axis=1,
        )
        log_p -= log_p.max(axis=1, keepdims=True)
        p = np.exp(log_p)
        return p / p.sum(axis=1, keepdims=True)

    def to_params(self):
        return {
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }

    @classmethod
    def from_params(cls, classes, p):
        return cls(classes, p["priors"], p["means"], p["variances"])


@dataclass
class _TreeArrays:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    dist: np.ndarray  # training class counts per node

    def leaf_proba(self, X: np.ndarray) -> np.ndarray:
        leaves = _tree.apply_tree(
            np.ascontiguousarray(X, dtype=np.float64),
            self.feature, self.threshold, self.left, self.right,
        )
        counts = self.dist[leaves]
        totals = counts.sum(axis=1, keepdims=True)
        totals[totals == 0] = 1.0
        return counts / totals

    def to_lists(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "dist": self.dist.tolist(),
        }

    @classmethod
    def from_lists(cls, p: dict) -> "_TreeArrays":
        return cls(
            np.array(p["feature"], dtype=np.int64),
            np.array(p["threshold"], dtype=np.float64),
            np.array(p["left"], dtype=np.int64),
            np.array(p["right"], dtype=np.int64),
            np.array(p["dist"], dtype=np.float64),
        )


def _grow(X, y_enc, n_classes, max_features, min_samples_leaf, max_depth, seed) -> _TreeArrays:
    arrays = _tree.grow_tree(
        np.ascontiguousarray(X, dtype=np.float64),
        np.ascontiguousarray(y_enc, dtype=np.int64),
        n_classes,
        max_features,
        min_samples_leaf,
        max_depth,
        np.uint64(seed & 0xFFFFFFFFFFFFFFFF) or np.uint64(1),
    )
    return _TreeArrays(*arrays)


def _reduced_error_prune(tree: _TreeArrays, X_val: np.ndarray, y_val: np.ndarray) -> None:
    """Bottom-up pruning: collapse any subtree whose leaf replacement does not
    increase validation errors."""
    if len(X_val) == 0:
        return
    leaves = None
    # validation rows reaching each node
    reach: dict[int, list[int]] = {0: list(range(len(X_val)))}
    order = [0]
    for node in order:
        if tree.feature[node] == _tree.NO_FEATURE:
            continue
        rows = reach[node]
        f, t = tree.feature[node], tree.threshold[node]
        l_rows = [i for i in rows if X_val[i, f] <= t]
        r_rows = [i for i in rows if X_val[i, f] > t]
        reach[tree.left[node]] = l_rows
        reach[tree.right[node]] = r_rows
        order.append(tree.left[node])
        order.append(tree.right[node])

    def subtree_errors(node: int) -> int:
        if tree.feature[node] == _tree.NO_FEATURE:
            pred = int(tree.dist[node].argmax())
            return sum(1 for i in reach.get(node, ()) if y_val[i] != pred)
        return subtree_errors(tree.left[node]) + subtree_errors(tree.right[node])

    for node in reversed(order):
        if tree.feature[node] == _tree.NO_FEATURE:
            continue
        pred = int(tree.dist[node].argmax())
        leaf_errors = sum(1 for i in reach.get(node, ()) if y_val[i] != pred)
        if leaf_errors <= subtree_errors(node):
            tree.feature[node] = _tree.NO_FEATURE


class DecisionTreeClassifier(Classifier):
    """Information-gain tree with reduced-error pruning on a held-out slice."""

    kind = "decision_tree"

    def __init__(self, classes, tree: _TreeArrays):
        self.classes = tuple(classes)
        self.tree = tree

    @classmethod
    def fit(cls, X, y_enc, classes, seed=0, min_samples_leaf=2, max_depth=0,
            prune_fraction=0.2):
        X = np.asarray(X, dtype=np.float64)
        n = len(X)
        rng = np.random.default_rng(seed)
        perm = rng.permutation(n)
        n_val = int(n * prune_fraction) if prune_fraction > 0 and n >= 10 else 0
        val_idx, train_idx = perm[:n_val], perm[n_val:]
        if len(set(y_enc[train_idx].tolist())) < 2:
            train_idx, val_idx = perm, perm[:0]
        tree = _grow(X[train_idx], y_enc[train_idx], len(classes),
                     X.shape[1], min_samples_leaf, max_depth, seed + 1)
        if len(val_idx) > 0:
            _reduced_error_prune(tree, X[val_idx], y_enc[val_idx])
        return cls(classes, tree)

    def predict_proba(self, X):
        return self.tree.leaf_proba(np.asarray(X, dtype=np.float64))

    def to_params(self):
        return {"tree": self.tree.to_lists()}

    @classmethod
    def from_params(cls, classes, p):
        return cls(classes, _TreeArrays.from_lists(p["tree"]))


class RandomForestClassifier(Classifier):
    """Bagged information-gain trees with sqrt(d) feature subsampling.

    Prediction averages the leaf class distributions over trees.
    """

    kind = "random_forest"

    def __init__(self, classes, trees: list[_TreeArrays]):
        self.classes = tuple(classes)
        self.trees = trees

    @classmethod
    def fit(cls, X, y_enc, classes, seed=0, n_trees=DEFAULT_FOREST_TREES,
            min_samples_leaf=1, max_depth=0):
        X = np.ascontiguousarray(X, dtype=np.float64)
        n, d = X.shape
        mtry = max(1, int(math.sqrt(d)))
        trees = []
        for t in range(n_trees):
            rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
            boot = rng.integers(0, n, size=n)
            tree_seed = int(rng.integers(1, 2**63 - 1))
            trees.append(
                _grow(X[boot], y_enc[boot], len(classes), mtry,
                      min_samples_leaf, max_depth, tree_seed)
            )
        return cls(classes, trees)

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        acc = np.zeros((len(X), len(self.classes)))
        for tree in self.trees:
            acc += tree.leaf_proba(X)
        return acc / len(self.trees)

    def to_params(self):
        return {"trees": [t.to_lists() for t in self.trees]}

    @classmethod
    def from_params(cls, classes, p):
        return cls(classes, [_TreeArrays.from_lists(t) for t in p["trees"]])


def _fit_stump(X_sorted_idx, X, z, w):
    """Weighted least-squares regression stump; returns (feature, threshold, a, b, sse)."""
    n, d = X.shape
    w_sum = w.sum()
    wz_sum = (w * z).sum()
    best = (0, 0.0, 0.0, 0.0, math.inf)
    for f in range(d):
        order = X_sorted_idx[:, f]
        vals = X[order, f]
        wc = np.cumsum(w[order])
        wzc = np.cumsum((w * z)[order])
        # candidate splits where the value changes
        change = np.flatnonzero(vals[:-1] != vals[1:])
        if len(change) == 0:
            continue
        wl = wc[change]
        wr = w_sum - wl
        valid = (wl > 0) & (wr > 0)
        if not valid.any():
            continue
        zl = wzc[change] / np.where(wl > 0, wl, 1.0)
        zr = (wz_sum - wzc[change]) / np.where(wr > 0, wr, 1.0)
        # weighted SSE decomposes; constant term dropped, so maximize explained part
        explained = wl * zl**2 + wr * zr**2
        explained[~valid] = -math.inf
        pos = int(explained.argmax())
        sse = -float(explained[pos])
        if sse < best[4]:
            thresh = 0.5 * (vals[change[pos]] + vals[change[pos] + 1])
            best = (f, float(thresh), float(zl[pos]), float(zr[pos]), sse)
    return best


class LogitBoostClassifier(Classifier):
    """Stagewise additive logistic regression over depth-1 regression stumps.

    Binary base algorithm; multi-class handled one-vs-rest with probability
    renormalization.
    """

    kind = "logitboost"

    Z_MAX = 4.0

    def __init__(self, classes, stumps):
        # stumps[c] = list of (feature, threshold, left_value, right_value)
        self.classes = tuple(classes)
        self.stumps = stumps

    @classmethod
    def fit(cls, X, y_enc, classes, iterations=100):
        X = np.asarray(X, dtype=np.float64)
        n = len(X)
        sorted_idx = np.argsort(X, axis=0, kind="mergesort")
        per_class = []
        binary = len(classes) == 2
        targets = [1] if binary else range(len(classes))
        for c in targets:
            ybin = (y_enc == c).astype(np.float64)
            F = np.zeros(n)
            stumps = []
            for _ in range(iterations):
                p = 1.0 / (1.0 + np.exp(-2.0 * F))
                w = np.maximum(p * (1.0 - p), 1e-10)
                z = np.clip((ybin - p) / w, -cls.Z_MAX, cls.Z_MAX)
                f, t, a, b, sse = _fit_stump(sorted_idx, X, z, w)
                if not math.isfinite(sse):
                    break
                step = np.where(X[:, f] <= t, a, b)
                F += 0.5 * step
                stumps.append((int(f), float(t), float(a), float(b)))
            per_class.append(stumps)
        return cls(classes, per_class)

    def _score(self, X, stumps):
        F = np.zeros(len(X))
        for f, t, a, b in stumps:
            F += 0.5 * np.where(X[:, f] <= t, a, b)
        return 1.0 / (1.0 + np.exp(-2.0 * F))

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        if len(self.classes) == 2:
            p1 = self._score(X, self.stumps[0])
            return np.stack([1.0 - p1, p1], axis=1)
        scores = np.stack([self._score(X, s) for s in self.stumps], axis=1)
        totals = scores.sum(axis=1, keepdims=True)
        totals[totals == 0] = 1.0
        return scores / totals

    def to_params(self):
        return {"stumps": self.stumps}

    @classmethod
    def from_params(cls, classes, p):
        stumps = [[tuple(s) for s in group] for group in p["stumps"]]
        return cls(classes, stumps)


_FIT_DISPATCH = {
    "logistic": lambda X, y, classes, cfg, seed: LogisticClassifier.fit(
        X, y, classes,
        l2=cfg.get("l2", 1e-3),
        learning_rate=cfg.get("learning_rate", 0.5),
        iterations=cfg.get("iterations", 500),
    ),
    "naive_bayes": lambda X, y, classes, cfg, seed: GaussianNBClassifier.fit(X, y, classes),
    "decision_tree": lambda X, y, classes, cfg, seed: DecisionTreeClassifier.fit(
        X, y, classes, seed=seed,
        min_samples_leaf=cfg.get("min_samples_leaf", 2),
        max_depth=cfg.get("max_depth", 0),
        prune_fraction=cfg.get("prune_fraction", 0.2),
    ),
    "random_forest": lambda X, y, classes, cfg, seed: RandomForestClassifier.fit(
        X, y, classes, seed=seed,
        n_trees=cfg.get("n_trees", DEFAULT_FOREST_TREES),
        min_samples_leaf=cfg.get("min_samples_leaf", 1),
        max_depth=cfg.get("max_depth", 0),
    ),
    "logitboost": lambda X, y, classes, cfg, seed: LogitBoostClassifier.fit(
        X, y, classes, iterations=cfg.get("iterations", 100)
    ),
}

_FROM_PARAMS = {
    "logistic": LogisticClassifier.from_params,
    "naive_bayes": GaussianNBClassifier.from_params,
    "decision_tree": DecisionTreeClassifier.from_params,
    "random_forest": RandomForestClassifier.from_params,
    "logitboost": LogitBoostClassifier.from_params,
}


def train_classifier(
    kind: str,
    X: np.ndarray,
    y: Sequence[str],
    config: dict | None = None,
    seed: int = 0,
    classes: Sequence[str] | None = None,
) -> Classifier:
    """Fit one classifier from the menu; deterministic given (data, config, seed)."""
    if kind not in _FIT_DISPATCH:
        raise ClassifierError(f"unknown classifier kind {kind!r}")
    X = np.asarray(X, dtype=np.float64)
    if np.isnan(X).any():
        raise ClassifierError("feature matrix contains NaN")
    ordered, y_enc = _encode_labels(y, classes)
    return _FIT_DISPATCH[kind](X, y_enc, ordered, config or {}, seed)


def classifier_from_params(kind: str, classes: Sequence[str], params: dict) -> Classifier:
    if kind not in _FROM_PARAMS:
        raise ClassifierError(f"unknown classifier kind {kind!r}")
    return _FROM_PARAMS[kind](tuple(classes), params)


def cost_sensitive_predict(
    probas: np.ndarray, classes: Sequence[str], cm: CostMatrix
) -> list[str]:
    """Minimum-expected-cost decisions; ties go to the lower ordinal class."""
    if len(classes) != len(cm.classes):
        raise ClassifierError("cost matrix dimension mismatch")
    # align cost rows to the classifier's class order
    perm = [cm.classes.index(c) for c in classes]
    costs = np.array([[cm.costs[a][p] for p in perm] for a in perm])
    expected = np.asarray(probas) @ costs
    out = []
    for row in expected:
        best = min(range(len(classes)), key=lambda j: (row[j], j))
        out.append(classes[best])
    return out
