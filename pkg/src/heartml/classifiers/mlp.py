"""One-hidden-layer perceptron with a sigmoid output unit, full-batch descent."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import RngStream
from .common import log_sigmoid, sigmoid
from .specs import MlpSpec


@dataclass(frozen=True)
class MlpParams:
    W1: np.ndarray  # (hidden, inputs)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,)
    b2: float
    activation: str = "relu"


def _act(z, activation):
    if activation == "relu":
        return np.maximum(z, 0.0)
    return sigmoid(z)


def _act_grad(z, a, activation):
    if activation == "relu":
        return (z > 0).astype(float)
    return a * (1.0 - a)


def mlp_forward(params: MlpParams, x):
    """Returns ``([input, hidden], output_probability)``; batches work row-wise."""
    x = np.asarray(x, dtype=float)
    z1 = x @ params.W1.T + params.b1
    hidden = _act(z1, params.activation)
    out = sigmoid(hidden @ params.w2 + params.b2)
    return [x, hidden], out


def mlp_loss(params: MlpParams, X, y) -> float:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    hidden = _act(X @ params.W1.T + params.b1, params.activation)
    z2 = hidden @ params.w2 + params.b2
    return float(-np.mean(y * log_sigmoid(z2) + (1 - y) * log_sigmoid(-z2)))


def mlp_grad(params: MlpParams, X, y) -> dict[str, np.ndarray]:
    """Exact gradient of the mean cross-entropy w.r.t. W1, b1, w2, b2."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    z1 = X @ params.W1.T + params.b1
    h = _act(z1, params.activation)
    p = sigmoid(h @ params.w2 + params.b2)
    delta2 = (p - y) / n  # dL/dz2 per row
    g_w2 = h.T @ delta2
    g_b2 = float(delta2.sum())
    delta1 = np.outer(delta2, params.w2) * _act_grad(z1, h, params.activation)
    g_W1 = delta1.T @ X
    g_b1 = delta1.sum(axis=0)
    return {"W1": g_W1, "b1": g_b1, "w2": g_w2, "b2": np.array(g_b2)}


def init_params(spec: MlpSpec, n_inputs: int, gen: np.random.Generator) -> MlpParams:
    h = spec.hidden_units
    s1 = spec.init_scale or np.sqrt(6.0 / (n_inputs + h))
    s2 = spec.init_scale or np.sqrt(6.0 / (h + 1))
    W1 = gen.uniform(-s1, s1, size=(h, n_inputs))
    w2 = gen.uniform(-s2, s2, size=h)
    return MlpParams(W1, np.zeros(h), w2, 0.0, spec.activation)


def fit(spec: MlpSpec, X, y, rng: RngStream) -> MlpParams:
    params = init_params(spec, X.shape[1], rng.child("init").generator())
    lr = spec.learning_rate
    W1, b1, w2, b2 = params.W1, params.b1, params.w2, params.b2
    for _ in range(spec.epochs):
        g = mlp_grad(MlpParams(W1, b1, w2, b2, spec.activation), X, y)
        W1 = W1 - lr * g["W1"]
        b1 = b1 - lr * g["b1"]
        w2 = w2 - lr * g["w2"]
        b2 = b2 - lr * float(g["b2"])
    return MlpParams(W1, b1, w2, float(b2), spec.activation)


def proba(params: MlpParams, spec, X) -> np.ndarray:
    return np.atleast_1d(mlp_forward(params, X)[1])
