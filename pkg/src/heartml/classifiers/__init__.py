"""The seven base classifiers behind one fit / predict_proba contract."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import DomainError
from ..rng import RngStream
from . import forest, gnb, knn, logreg, mlp, svm, tree
from .common import check_width, check_xy, predict_label, sigmoid
from .specs import (
    KINDS,
    ForestSpec,
    GnbSpec,
    KnnSpec,
    LogRegSpec,
    MlpSpec,
    ModelSpec,
    SvmSpec,
    TreeSpec,
    default_spec,
    make_spec,
    spec_from_dict,
    spec_to_dict,
    spec_to_text,
)

_BACKENDS = {
    "logreg": logreg,
    "knn": knn,
    "svm": svm,
    "tree": tree,
    "gnb": gnb,
    "forest": forest,
    "mlp": mlp,
}
# kinds that cannot be trained on a single class
_NEEDS_BOTH = {"logreg", "svm", "gnb", "mlp"}

DISPLAY_NAMES = {
    "logreg": "Logit",
    "knn": "KNN",
    "svm": "SVM",
    "tree": "Decision Tree",
    "gnb": "Gaussian NB",
    "mlp": "MLP",
    "forest": "Random Forest",
}


@dataclass(frozen=True)
class FittedModel:
    spec: ModelSpec
    learned: Any
    n_features: int

    @property
    def kind(self) -> str:
        return self.spec.kind

    def predict_proba(self, X) -> np.ndarray:
        return predict_proba(self, X)


def fit_model(spec: ModelSpec, X, y, rng: RngStream) -> FittedModel:
    X, y = check_xy(X, y, spec.kind, spec.kind in _NEEDS_BOTH)
    learned = _BACKENDS[spec.kind].fit(spec, X, y, rng)
    return FittedModel(spec, learned, X.shape[1])


def predict_proba(m: FittedModel, X) -> np.ndarray:
    X = check_width(X, m.n_features, m.kind)
    p = _BACKENDS[m.kind].proba(m.learned, m.spec, X)
    return np.clip(np.asarray(p, dtype=float), 0.0, 1.0)


__all__ = [
    "KINDS", "DISPLAY_NAMES", "FittedModel", "ModelSpec", "LogRegSpec", "KnnSpec",
    "SvmSpec", "TreeSpec", "GnbSpec", "ForestSpec", "MlpSpec", "default_spec",
    "make_spec", "spec_from_dict", "spec_to_dict", "spec_to_text", "fit_model",
    "predict_proba", "predict_label", "sigmoid", "DomainError",
]
