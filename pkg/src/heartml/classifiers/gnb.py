"""Gaussian naive Bayes with log-space posteriors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import sigmoid
from .specs import GnbSpec


@dataclass(frozen=True)
class GnbParams:
    class_counts: np.ndarray  # (2,)
    means: np.ndarray  # (2, d)
    variances: np.ndarray  # (2, d), smoothing already added

    @property
    def priors(self) -> np.ndarray:
        return self.class_counts / self.class_counts.sum()


def fit(spec: GnbSpec, X, y, rng=None) -> GnbParams:
    eps = spec.var_smoothing_eps * float(np.max(np.var(X, axis=0)))
    counts = np.array([np.count_nonzero(y == 0), np.count_nonzero(y == 1)], dtype=float)
    means = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
    variances = np.vstack([X[y == c].var(axis=0) for c in (0, 1)]) + eps
    return GnbParams(counts, means, variances)


def gnb_joint_log_likelihood(model: GnbParams, X) -> np.ndarray:
    """Per-class log prior + sum of per-feature Gaussian log densities, shape (n, 2)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.empty((X.shape[0], 2))
    log_priors = np.log(model.priors)
    for c in (0, 1):
        var = model.variances[c]
        ll = -0.5 * np.log(2 * np.pi * var) - (X - model.means[c]) ** 2 / (2 * var)
        out[:, c] = log_priors[c] + ll.sum(axis=1)
    return out


def posterior(model: GnbParams, X) -> np.ndarray:
    jll = gnb_joint_log_likelihood(model, X)
    # two-class softmax written as a sigmoid of the log-odds
    return np.atleast_1d(sigmoid(jll[:, 1] - jll[:, 0]))


def proba(params: GnbParams, spec, X) -> np.ndarray:
    return posterior(params, X)
