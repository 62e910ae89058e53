"""CART classification tree (Gini impurity, binary threshold splits)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .specs import TreeSpec

# Gains at or below this are rounding noise, not real purity improvements.
MIN_GAIN = 1e-12
LEAF = -1


def gini_impurity(class_counts) -> float:
    n0, n1 = (float(c) for c in class_counts)
    total = n0 + n1
    if total < 1:
        raise DomainError("gini impurity of an empty node is undefined")
    p0, p1 = n0 / total, n1 / total
    return 1.0 - p0 * p0 - p1 * p1


def _gini_vec(n1, n):
    p1 = n1 / n
    return 1.0 - p1 * p1 - (1.0 - p1) ** 2


def best_split(X_node, y_node, candidate_features, min_samples_leaf: int = 1):
    """Best (feature, threshold, gain) over midpoint thresholds, or None.

    Ties go to the lower feature index, then the lower threshold.
    """
    X_node = np.asarray(X_node, dtype=float)
    if X_node.ndim == 1:
        X_node = X_node.reshape(-1, 1)
    y_node = np.asarray(y_node, dtype=float)
    n = y_node.shape[0]
    if n < 2:
        return None
    total1 = y_node.sum()
    parent = _gini_vec(total1, n)
    best = None
    best_gain = 0.0
    positions = np.arange(1, n)
    for f in sorted(int(c) for c in candidate_features):
        order = np.argsort(X_node[:, f], kind="stable")
        xs = X_node[order, f]
        cum1 = np.cumsum(y_node[order])[:-1]
        valid = xs[:-1] < xs[1:]
        valid &= (positions >= min_samples_leaf) & (n - positions >= min_samples_leaf)
        if not valid.any():
            continue
        n_l = positions
        n_r = n - positions
        gain = parent - (n_l / n) * _gini_vec(cum1, n_l) - (n_r / n) * _gini_vec(total1 - cum1, n_r)
        gain = np.where(valid, gain, -np.inf)
        # gains within MIN_GAIN of each other are ties (float noise)
        i = int(np.flatnonzero(gain >= gain.max() - MIN_GAIN)[0])
        if gain[i] > best_gain + MIN_GAIN:
            lo, hi = xs[i], xs[i + 1]
            threshold = lo + (hi - lo) / 2.0
            if threshold >= hi:  # adjacent floats
                threshold = lo
            best_gain = float(gain[i])
            best = (f, float(threshold), best_gain)
    return best


@dataclass(frozen=True)
class TreeParams:
    """Node arena. ``feature[i] == -1`` marks a leaf; ``counts[i]`` = (n0, n1)."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())


def grow_tree(X, y, spec: TreeSpec, n_candidates: int | None = None, gen=None) -> TreeParams:
    """Grow depth-first (left subtree before right).

    When ``n_candidates`` is below the feature count, each node draws that
    many features without replacement from ``gen``.
    """
    n_features = X.shape[1]
    if n_candidates is None or n_candidates >= n_features:
        n_candidates = n_features
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx):
        n1 = int(y[idx].sum())
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        counts.append((len(idx) - n1, n1))
        return len(feature) - 1

    root = new_node(np.arange(X.shape[0]))
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        n0, n1 = counts[node]
        if n0 == 0 or n1 == 0 or len(idx) < spec.min_samples_split:
            continue
        if spec.max_depth is not None and depth >= spec.max_depth:
            continue
        if n_candidates < n_features:
            cands = gen.choice(n_features, size=n_candidates, replace=False)
        else:
            cands = range(n_features)
        split = best_split(X[idx], y[idx], cands, spec.min_samples_leaf)
        if split is None:
            continue
        f, thr, _ = split
        go_left = X[idx, f] <= thr
        l_idx, r_idx = idx[go_left], idx[~go_left]
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node(l_idx)
        right[node] = new_node(r_idx)
        # right pushed first so the left subtree is expanded first
        stack.append((right[node], r_idx, depth + 1))
        stack.append((left[node], l_idx, depth + 1))
    return TreeParams(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=float),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(counts, dtype=np.int64).reshape(-1, 2),
    )


def fit(spec: TreeSpec, X, y, rng=None) -> TreeParams:
    return grow_tree(X, y, spec)


def apply(tree: TreeParams, X) -> np.ndarray:
    """Leaf index reached by each row."""
    node = np.zeros(X.shape[0], dtype=np.int64)
    active = tree.feature[node] != LEAF
    while active.any():
        rows = np.flatnonzero(active)
        cur = node[rows]
        goes_left = X[rows, tree.feature[cur]] <= tree.threshold[cur]
        node[rows] = np.where(goes_left, tree.left[cur], tree.right[cur])
        active = tree.feature[node] != LEAF
    return node


def proba(params: TreeParams, spec, X) -> np.ndarray:
    leaf = apply(params, X)
    c = params.counts[leaf]
    return c[:, 1] / c.sum(axis=1)
