"""Random forest: bagged CART trees with per-split feature subsampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import RngStream
from . import tree as _tree
from .specs import ForestSpec


@dataclass(frozen=True)
class ForestParams:
    trees: tuple
    labels: tuple[str, ...]


def forest_fit(X, y, spec: ForestSpec, rng: RngStream) -> ForestParams:
    n = X.shape[0]
    tree_spec = spec.tree_spec()
    n_candidates = spec.n_candidates(X.shape[1])
    trees, labels = [], []
    for t in range(spec.n_trees):
        stream = rng.child(f"tree-{t}")
        gen = stream.generator()
        if spec.bootstrap:
            idx = gen.integers(0, n, size=n)
            Xt, yt = X[idx], y[idx]
        else:
            Xt, yt = X, y
        trees.append(_tree.grow_tree(Xt, yt, tree_spec, n_candidates, gen))
        labels.append(stream.label)
    return ForestParams(tuple(trees), tuple(labels))


def fit(spec: ForestSpec, X, y, rng: RngStream) -> ForestParams:
    return forest_fit(X, y, spec, rng)


def proba(params: ForestParams, spec, X) -> np.ndarray:
    total = np.zeros(X.shape[0])
    for t in params.trees:
        total += _tree.proba(t, None, X)
    return total / len(params.trees)
