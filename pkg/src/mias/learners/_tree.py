"""Array-based decision tree kernels (numba-compiled) shared by the tree and forest."""

from __future__ import annotations

import numpy as np
from numba import njit

NO_FEATURE = -1


@njit(cache=True)
def _xorshift(state: np.uint64) -> np.uint64:
    state ^= state << np.uint64(13)
    state ^= state >> np.uint64(7)
    state ^= state << np.uint64(17)
    return state


@njit(cache=True)
def _entropy(counts, total):
    if total <= 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * np.log2(p)
    return h


@njit(cache=True)
def grow_tree(X, y, n_classes, max_features, min_samples_leaf, max_depth, seed):
    """Grow an information-gain tree; returns flat node arrays.

    Leaf nodes have feature == -1. dist rows hold the training class counts of
    every node (internal ones included, for pruning).
    """
    n, d = X.shape
    max_nodes = 2 * n + 1
    feature = np.full(max_nodes, NO_FEATURE, dtype=np.int64)
    threshold = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    dist = np.zeros((max_nodes, n_classes), dtype=np.float64)

    # stack of (node_id, start, end, depth) over a shared index buffer
    indices = np.arange(n)
    stack_node = np.empty(max_nodes, dtype=np.int64)
    stack_start = np.empty(max_nodes, dtype=np.int64)
    stack_end = np.empty(max_nodes, dtype=np.int64)
    stack_depth = np.empty(max_nodes, dtype=np.int64)
    stack_top = 0
    node_count = 1
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n
    stack_depth[0] = 0
    stack_top = 1

    state = np.uint64(seed if seed != 0 else 0x9E3779B97F4A7C15)
    feat_order = np.empty(d, dtype=np.int64)

    while stack_top > 0:
        stack_top -= 1
        node = stack_node[stack_top]
        start = stack_start[stack_top]
        end = stack_end[stack_top]
        depth = stack_depth[stack_top]
        m = end - start

        counts = np.zeros(n_classes, dtype=np.float64)
        for i in range(start, end):
            counts[y[indices[i]]] += 1.0
        dist[node] = counts

        pure = False
        for c in range(n_classes):
            if counts[c] == m:
                pure = True
        if pure or m < 2 * min_samples_leaf or (max_depth > 0 and depth >= max_depth):
            continue

        parent_h = _entropy(counts, m)

        # partial Fisher-Yates pick of max_features candidate features
        for j in range(d):
            feat_order[j] = j
        n_try = max_features if max_features < d else d
        for j in range(n_try):
            state = _xorshift(state)
            k = j + int(state % np.uint64(d - j))
            tmp = feat_order[j]
            feat_order[j] = feat_order[k]
            feat_order[k] = tmp

        best_gain = 0.0
        best_feat = NO_FEATURE
        best_thresh = 0.0
        vals = np.empty(m, dtype=np.float64)
        node_idx = indices[start:end]
        for t in range(n_try):
            f = feat_order[t]
            for i in range(m):
                vals[i] = X[node_idx[i], f]
            order = np.argsort(vals, kind="mergesort")
            left_counts = np.zeros(n_classes, dtype=np.float64)
            nl = 0.0
            for pos in range(m - 1):
                idx = node_idx[order[pos]]
                left_counts[y[idx]] += 1.0
                nl += 1.0
                v_here = vals[order[pos]]
                v_next = vals[order[pos + 1]]
                if v_here == v_next:
                    continue
                nr = m - nl
                if nl < min_samples_leaf or nr < min_samples_leaf:
                    continue
                h = (nl / m) * _entropy(left_counts, nl)
                right_counts = counts - left_counts
                h += (nr / m) * _entropy(right_counts, nr)
                gain = parent_h - h
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_feat = f
                    best_thresh = 0.5 * (v_here + v_next)

        if best_feat == NO_FEATURE:
            continue

        # partition indices[start:end] in place around the threshold
        lo = start
        hi = end - 1
        while lo <= hi:
            if X[indices[lo], best_feat] <= best_thresh:
                lo += 1
            else:
                tmp = indices[lo]
                indices[lo] = indices[hi]
                indices[hi] = tmp
                hi -= 1
        mid = lo
        if mid == start or mid == end:
            continue

        feature[node] = best_feat
        threshold[node] = best_thresh
        left_id = node_count
        right_id = node_count + 1
        node_count += 2
        left[node] = left_id
        right[node] = right_id
        stack_node[stack_top] = left_id
        stack_start[stack_top] = start
        stack_end[stack_top] = mid
        stack_depth[stack_top] = depth + 1
        stack_top += 1
        stack_node[stack_top] = right_id
        stack_start[stack_top] = mid
        stack_end[stack_top] = end
        stack_depth[stack_top] = depth + 1
        stack_top += 1

    return (
        feature[:node_count],
        threshold[:node_count],
        left[:node_count],
        right[:node_count],
        dist[:node_count],
    )


@njit(cache=True)
def apply_tree(X, feature, threshold, left, right):
    """Leaf node id for each row."""
    n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        node = 0
        while feature[node] != NO_FEATURE:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out
