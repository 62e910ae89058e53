"""k-nearest-neighbour vote fractions on Euclidean distance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .specs import KnnSpec


@dataclass(frozen=True)
class KnnParams:
    X: np.ndarray
    y: np.ndarray


def _sq_distances(train, query):
    diff = train - query
    return np.einsum("ij,ij->i", diff, diff)


def knn_neighbors(train, query, k: int) -> np.ndarray:
    """Indices of the k closest rows; equal distances keep the lower index first."""
    train = np.asarray(train, dtype=float)
    if train.ndim == 1:
        train = train.reshape(-1, 1)
    query = np.asarray(query, dtype=float).reshape(-1)
    if not 1 <= k <= train.shape[0]:
        raise DomainError(f"k={k} outside 1..{train.shape[0]}")
    d2 = _sq_distances(train, query)
    return np.argsort(d2, kind="stable")[:k]


def fit(spec: KnnSpec, X, y, rng=None) -> KnnParams:
    if spec.k > X.shape[0]:
        raise DomainError(f"knn: k={spec.k} exceeds {X.shape[0]} training rows")
    return KnnParams(np.array(X, dtype=float), np.array(y, dtype=np.int64))


def proba(params: KnnParams, spec: KnnSpec, X) -> np.ndarray:
    out = np.empty(X.shape[0])
    for r, q in enumerate(X):
        idx = knn_neighbors(params.X, q, spec.k)
        out[r] = params.y[idx].mean()
    return out
