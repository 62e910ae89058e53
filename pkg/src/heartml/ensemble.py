"""Hard (majority) and soft (mean probability) voting over fitted models."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifiers import KINDS, FittedModel, default_spec, fit_model, predict_label
from .classifiers.specs import ModelSpec
from .errors import DomainError
from .rng import RngStream

SOFT = "soft"
HARD = "hard"


def _check_weights(weights, n: int) -> np.ndarray:
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise DomainError(f"expected {n} weights, got {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DomainError("weights must be finite and non-negative")
    if not np.any(w > 0):
        raise DomainError("at least one weight must be positive")
    return w


def soft_vote(member_probs, weights=None) -> tuple[float, int]:
    p = np.asarray(member_probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DomainError("soft_vote needs a non-empty list of probabilities")
    w = _check_weights(weights, p.size)
    prob = float(w @ p / w.sum())
    # guard against the convex combination drifting past the extremes
    prob = min(max(prob, float(p.min())), float(p.max()))
    return prob, predict_label(prob)


def hard_vote(member_labels, weights=None) -> int:
    """Weighted majority; an exact tie goes to class 1."""
    labels = np.asarray(member_labels)
    if labels.ndim != 1 or labels.size == 0:
        raise DomainError("hard_vote needs a non-empty list of labels")
    if not np.all(np.isin(labels, (0, 1))):
        raise DomainError("labels must be 0 or 1")
    w = _check_weights(weights, labels.size)
    yes = float(w[labels == 1].sum())
    no = float(w[labels == 0].sum())
    return 1 if yes >= no else 0


@dataclass(frozen=True)
class EnsembleSpec:
    members: tuple[ModelSpec, ...] = field(default_factory=lambda: tuple(default_spec(k) for k in KINDS))
    mode: str = SOFT
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.members:
            raise DomainError("an ensemble needs at least one member")
        if self.mode not in (SOFT, HARD):
            raise DomainError(f"unknown voting mode {self.mode!r}")
        if self.weights is not None:
            _check_weights(self.weights, len(self.members))

    @property
    def kind(self) -> str:
        return f"{self.mode}-vote"


@dataclass(frozen=True)
class EnsembleModel:
    members: tuple[FittedModel, ...]
    mode: str = SOFT
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.members:
            raise DomainError("an ensemble needs at least one member")
        if self.mode not in (SOFT, HARD):
            raise DomainError(f"unknown voting mode {self.mode!r}")
        widths = {m.n_features for m in self.members}
        if len(widths) != 1:
            raise DomainError(f"members trained on different widths {sorted(widths)}")
        object.__setattr__(
            self, "weights", tuple(_check_weights(self.weights, len(self.members)).tolist())
        )

    @property
    def kind(self) -> str:
        return f"{self.mode}-vote"

    @property
    def n_features(self) -> int:
        return self.members[0].n_features

    def member_probas(self, X) -> np.ndarray:
        """Matrix of member probabilities, shape (n_members, n_rows)."""
        return np.vstack([m.predict_proba(X) for m in self.members])

    def predict_proba(self, X) -> np.ndarray:
        return ensemble_predict_proba(self, X)


def combine(P: np.ndarray, mode: str, weights) -> np.ndarray:
    """Row-wise vote over a (n_members, n_rows) probability matrix."""
    w = _check_weights(weights, P.shape[0])
    if mode == SOFT:
        out = (w @ P) / w.sum()
        return np.clip(out, P.min(axis=0), P.max(axis=0))
    votes = (P >= 0.5).astype(float)
    # vote fraction doubles as a score for ROC curves
    return (w @ votes) / w.sum()


def ensemble_predict_proba(e: EnsembleModel, X) -> np.ndarray:
    return combine(e.member_probas(X), e.mode, e.weights)


def fit_ensemble(spec: EnsembleSpec, X, y, rng: RngStream) -> EnsembleModel:
    labels = member_stream_labels(spec)
    members = tuple(
        fit_model(m, X, y, rng.child(label)) for m, label in zip(spec.members, labels)
    )
    return EnsembleModel(members, spec.mode, spec.weights)


def _unique_kinds(spec: EnsembleSpec) -> bool:
    kinds = [m.kind for m in spec.members]
    return len(kinds) == len(set(kinds))


def member_stream_labels(spec: EnsembleSpec) -> list[str]:
    if _unique_kinds(spec):
        return [m.kind for m in spec.members]
    return [f"{m.kind}-{i}" for i, m in enumerate(spec.members)]
