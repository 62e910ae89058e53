from __future__ import annotations

import numpy as np

from ..errors import DegenerateTrainingError, DomainError


def sigmoid(z):
    """Logistic function, stable for large |z| (no overflow warnings)."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def log_sigmoid(z):
    """log(sigmoid(z)) without cancellation."""
    return -np.logaddexp(0.0, -np.asarray(z, dtype=float))


def predict_label(p, threshold: float = 0.5):
    """1 where p >= threshold. A probability equal to the threshold counts as defect."""
    if not 0.0 <= threshold <= 1.0:
        raise DomainError(f"threshold {threshold} outside [0, 1]")
    arr = np.asarray(p, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise DomainError("probabilities must lie in [0, 1]")
    labels = (arr >= threshold).astype(np.int64)
    return labels if labels.ndim else int(labels)


def check_xy(X, y, kind: str, need_both_classes: bool):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DomainError(f"{kind}: X must be a non-empty 2-D matrix")
    if y.shape != (X.shape[0],):
        raise DomainError(f"{kind}: y length {y.shape} does not match X rows {X.shape[0]}")
    if not np.all(np.isin(y, (0, 1))):
        raise DomainError(f"{kind}: labels must be 0 or 1")
    y = y.astype(np.int64)
    if need_both_classes and np.unique(y).size < 2:
        raise DegenerateTrainingError(kind)
    return X, y


def check_width(X, width: int, kind: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != width:
        raise DomainError(f"{kind}: expected {width} features, got shape {X.shape}")
    return X
