"""Logistic regression trained by full-batch gradient descent."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import log_sigmoid, sigmoid
from .specs import LogRegSpec


@dataclass(frozen=True)
class LogRegParams:
    weights: np.ndarray
    bias: float
    iterations: int
    converged: bool


def logreg_loss_grad(weights, bias, X, y, l2_lambda=0.0):
    """Mean cross-entropy + (l2_lambda / 2) * ||w||^2 and its exact gradient."""
    w = np.asarray(weights, dtype=float)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    z = X @ w + bias
    # -[y log p + (1-y) log(1-p)], with log(1-p) = log_sigmoid(-z)
    loss = -np.mean(y * log_sigmoid(z) + (1 - y) * log_sigmoid(-z))
    loss += 0.5 * l2_lambda * float(w @ w)
    resid = sigmoid(z) - y
    grad_w = X.T @ resid / X.shape[0] + l2_lambda * w
    grad_b = float(np.mean(resid))
    return float(loss), grad_w, grad_b


def fit(spec: LogRegSpec, X, y, rng=None) -> LogRegParams:
    w = np.zeros(X.shape[1])
    b = 0.0
    prev = None
    converged = False
    it = 0
    while it < spec.max_iters:
        loss, gw, gb = logreg_loss_grad(w, b, X, y, spec.l2_lambda)
        if prev is not None and abs(prev - loss) < spec.tolerance:
            converged = True
            break
        prev = loss
        w = w - spec.learning_rate * gw
        b = b - spec.learning_rate * gb
        it += 1
    return LogRegParams(w, float(b), it, converged)


def proba(params: LogRegParams, spec, X) -> np.ndarray:
    return np.atleast_1d(sigmoid(X @ params.weights + params.bias))
