"""Soft-margin SVM trained by SMO, probabilities by Platt scaling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import RngStream
from .common import sigmoid
from .specs import SvmSpec

@dataclass(frozen=True)
class SvmParams:
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i for each support vector
    bias: float
    gamma: float
    platt_a: float
    platt_b: float
    converged: bool
    platt_fallback: bool


def resolve_gamma(gamma, n_features: int) -> float:
    """``"auto"`` means 1 / n_features."""
    return 1.0 / n_features if gamma == "auto" else float(gamma)


def kernel_matrix(A, B, kernel: str, gamma: float) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if kernel == "linear":
        return A @ B.T
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def svm_train_smo(X, y_pm, C, kernel="linear", gamma="auto", tolerance=1e-3,
                  max_passes=100, rng: RngStream | None = None):
    """SMO on labels in {-1, +1}: repeated analytic two-alpha updates.

    The pair is the maximal KKT violator ``i`` plus the partner ``j`` with the
    largest second-order decrease of the dual. Stops once the violation gap
    drops below ``tolerance``, or after ``max_passes * n`` pair updates.
    ``rng`` is accepted for interface symmetry; pair selection is deterministic.

    Returns ``(alphas, bias, converged)``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y_pm, dtype=float)
    m = X.shape[0]
    K = kernel_matrix(X, X, kernel, resolve_gamma(gamma, X.shape[1]))
    diag = np.diag(K).copy()
    alpha = np.zeros(m)
    G = -np.ones(m)  # gradient of 0.5 a'Qa - sum(a), Q_ij = y_i y_j K_ij
    pos = y > 0
    converged = False
    for _ in range(max_passes * m):
        score = -y * G
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (~pos & (alpha < C)) | (pos & (alpha > 0))
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        top = score[i]
        if top - score[low].min() < tolerance:
            converged = True
            break
        cand = low & (score < top)
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, 1e-12)
        gain = np.where(cand, (top - score) ** 2 / a, -np.inf)
        j = int(np.argmax(gain))
        # move along d_i = y_i, d_j = -y_j, which keeps sum(alpha * y) fixed
        delta = (top - score[j]) / a[j]
        delta = min(delta, C - alpha[i] if pos[i] else alpha[i])
        delta = min(delta, alpha[j] if pos[j] else C - alpha[j])
        alpha[i] += y[i] * delta
        alpha[j] -= y[j] * delta
        G += y * (K[:, i] - K[:, j]) * delta
    np.clip(alpha, 0.0, C, out=alpha)
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yG[free].mean())
    else:
        score = -yG
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (~pos & (alpha < C)) | (pos & (alpha > 0))
        hi = score[up].max() if up.any() else 0.0
        lo = score[low].min() if low.any() else 0.0
        rho = -float(hi + lo) / 2.0
    return alpha, -rho, converged


def platt_calibrate(decision_values, y, max_iter=500, tolerance=1e-8):
    """Fit ``p = 1 / (1 + exp(A f + B))`` to labels in {0, 1}.

    Newton iterations with backtracking on the cross-entropy against Platt's
    smoothed targets. Returns ``(A, B, fallback)``; degenerate input gives
    ``(-1, 0, True)``.
    """
    f = np.asarray(decision_values, dtype=float)
    y = np.asarray(y)
    n_pos = int(np.count_nonzero(y == 1))
    n_neg = int(y.shape[0] - n_pos)
    if n_pos == 0 or n_neg == 0 or not np.all(np.isfinite(f)):
        return -1.0, 0.0, True
    hi, lo = (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0)
    t = np.where(y == 1, hi, lo)

    def objective(A, B):
        z = A * f + B
        # sum of t*log(1+e^z) + (1-t)*log(1+e^-z)... written stably
        return float(np.sum(t * z + np.logaddexp(0.0, -z)))

    A, B = 0.0, float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    fval = objective(A, B)
    for _ in range(max_iter):
        p = sigmoid(-(A * f + B))  # model probability of class 1
        d1 = t - p
        d2 = p * (1.0 - p)
        g1, g2 = float(np.sum(f * d1)), float(np.sum(d1))
        if abs(g1) < tolerance and abs(g2) < tolerance:
            break
        h11 = float(np.sum(f * f * d2)) + 1e-12
        h22 = float(np.sum(d2)) + 1e-12
        h21 = float(np.sum(f * d2))
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= 1e-10:
            nA, nB = A + step * dA, B + step * dB
            nf = objective(nA, nB)
            if nf < fval + 1e-4 * step * gd:
                A, B, fval = nA, nB, nf
                break
            step /= 2.0
        else:
            break
    if not (np.isfinite(A) and np.isfinite(B)) or A > 0:
        return -1.0, 0.0, True
    return float(A), float(B), False


def fit(spec: SvmSpec, X, y, rng: RngStream) -> SvmParams:
    y_pm = np.where(y == 1, 1.0, -1.0)
    alpha, b, converged = svm_train_smo(
        X, y_pm, spec.C, spec.kernel, spec.gamma, spec.tolerance,
        spec.max_passes, rng.child("smo"),
    )
    gamma = resolve_gamma(spec.gamma, X.shape[1])
    sv = alpha > 0
    params = SvmParams(
        np.array(X[sv], dtype=float), alpha[sv] * y_pm[sv], b, gamma, -1.0, 0.0, converged, True,
    )
    f = decision_function(params, spec, X)
    A, B, fallback = platt_calibrate(f, y)
    return SvmParams(params.support_vectors, params.dual_coef, b, gamma, A, B, converged, fallback)


def decision_function(params: SvmParams, spec: SvmSpec, X) -> np.ndarray:
    if params.support_vectors.shape[0] == 0:
        return np.full(np.atleast_2d(X).shape[0], params.bias)
    K = kernel_matrix(X, params.support_vectors, spec.kernel, params.gamma)
    return K @ params.dual_coef + params.bias


def proba(params: SvmParams, spec: SvmSpec, X) -> np.ndarray:
    f = decision_function(params, spec, X)
    return np.atleast_1d(sigmoid(-(params.platt_a * f + params.platt_b)))
