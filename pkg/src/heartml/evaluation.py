"""Confusion-matrix metrics, ROC/AUC and (stratified) k-fold cross-validation."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .classifiers import fit_model, predict_proba
from .classifiers.specs import ModelSpec
from .dataset import Dataset
from .ensemble import EnsembleSpec, combine, member_stream_labels
from .errors import DomainError, HeartMLError
from .preprocess import GLOBAL, PER_FOLD, SCALE_POLICIES, fit_scaler_matrix
from .rng import RngStream

FOLD_MEAN = "fold-mean"
POOLED = "pooled"
METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "roc_auc")


class FoldError(HeartMLError):
    def __init__(self, fold: int, cause: Exception):
        self.fold = fold
        super().__init__(f"fold {fold}: {cause}")


class UndefinedAucError(DomainError):
    """ROC/AUC requested for labels that contain a single class."""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricSet:
    accuracy: float
    precision: float
    recall: float
    f1: float
    roc_auc: float = 0.0
    flags: tuple[str, ...] = ()

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


@dataclass(frozen=True)
class RocCurve:
    """Points ``(threshold, fpr, tpr)`` from ``(+inf, 0, 0)`` to ``(1, 1)``."""

    points: tuple[tuple[float, float, float], ...]
    auc: float

    @property
    def fpr(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def tpr(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])


@dataclass
class CvReport:
    model_name: str
    k: int
    seed: int
    scale_policy: str
    per_fold: list[MetricSet]
    fold_sizes: list[int]
    mean: MetricSet
    pooled: MetricSet
    oof_scores: np.ndarray  # out-of-fold probability for every row
    targets: np.ndarray
    members: dict[str, "CvReport"] = field(default_factory=dict)

    def headline(self, aggregation: str = FOLD_MEAN) -> MetricSet:
        if aggregation == FOLD_MEAN:
            return self.mean
        if aggregation == POOLED:
            return self.pooled
        raise DomainError(f"unknown aggregation {aggregation!r}")

    def roc(self) -> RocCurve:
        return roc_curve(self.targets, self.oof_scores)


def _labels(v, name) -> np.ndarray:
    a = np.asarray(v)
    if a.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    if not np.all(np.isin(a, (0, 1))):
        raise DomainError(f"{name} must contain only 0/1")
    return a.astype(np.int64)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y = _labels(y_true, "y_true")
    p = _labels(y_pred, "y_pred")
    if y.shape != p.shape:
        raise DomainError(f"length mismatch: {y.shape[0]} vs {p.shape[0]}")
    if y.size == 0:
        raise DomainError("confusion matrix of zero rows")
    return ConfusionMatrix(
        tp=int(np.sum((y == 1) & (p == 1))),
        fp=int(np.sum((y == 0) & (p == 1))),
        tn=int(np.sum((y == 0) & (p == 0))),
        fn=int(np.sum((y == 1) & (p == 0))),
    )


def metrics_from_confusion(c: ConfusionMatrix) -> MetricSet:
    """Accuracy, precision, recall and F1; each 0/0 becomes 0 and is flagged."""
    if c.total <= 0:
        raise DomainError("confusion matrix is empty")
    flags = []
    accuracy = (c.tp + c.tn) / c.total
    if c.tp + c.fp == 0:
        precision = 0.0
        flags.append("precision_zero_division")
    else:
        precision = c.tp / (c.tp + c.fp)
    if c.tp + c.fn == 0:
        recall = 0.0
        flags.append("recall_zero_division")
    else:
        recall = c.tp / (c.tp + c.fn)
    if precision + recall == 0:
        f1 = 0.0
        flags.append("f1_zero_division")
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return MetricSet(accuracy, precision, recall, f1, 0.0, tuple(flags))


def roc_curve(y_true, scores) -> RocCurve:
    """Step through distinct scores (descending); AUC by the trapezoid rule."""
    y = _labels(y_true, "y_true")
    s = np.asarray(scores, dtype=float)
    if s.shape != y.shape:
        raise DomainError("scores and labels differ in length")
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAucError("ROC needs both classes present")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    tps = np.cumsum(y_sorted)
    fps = np.cumsum(1 - y_sorted)
    # last index of each run of tied scores
    ends = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
    points = [(math.inf, 0.0, 0.0)]
    for e in ends:
        points.append((float(s_sorted[e]), fps[e] / n_neg, tps[e] / n_pos))
    # the lowest threshold already reaches (1, 1); a -inf anchor would repeat it
    if points[-1][1:] != (1.0, 1.0):
        points.append((-math.inf, 1.0, 1.0))
    fpr = np.array([p[1] for p in points])
    tpr = np.array([p[2] for p in points])
    auc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(tuple((float(t), float(f), float(r)) for t, f, r in points), min(max(auc, 0.0), 1.0))


def score_predictions(y_true, probabilities, threshold: float = 0.5) -> MetricSet:
    """Threshold-based metrics from labels, roc_auc from the raw probabilities."""
    y = _labels(y_true, "y_true")
    p = np.asarray(probabilities, dtype=float)
    base = metrics_from_confusion(confusion(y, (p >= threshold).astype(np.int64)))
    flags = list(base.flags)
    try:
        auc = roc_curve(y, p).auc
    except UndefinedAucError:
        auc = 0.0
        flags.append("roc_auc_undefined")
    return MetricSet(base.accuracy, base.precision, base.recall, base.f1, auc, tuple(flags))


def mean_metrics(sets: list[MetricSet]) -> MetricSet:
    values = {name: float(np.mean([getattr(m, name) for m in sets])) for name in METRIC_NAMES}
    flags = tuple(sorted({f for m in sets for f in m.flags}))
    return MetricSet(**values, flags=flags)


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    if k < 2:
        raise DomainError("k must be at least 2")
    if k > n:
        raise DomainError(f"k={k} exceeds {n} rows")
    perm = RngStream(seed, "kfold").generator().permutation(n)
    return [np.sort(perm[f::k]) for f in range(k)]


def stratified_kfold_indices(y, k: int, seed: int) -> list[np.ndarray]:
    """Shuffle each class with ``seed`` and deal its indices round-robin.

    The deal continues across classes so fold sizes differ by at most one.
    Falls back to plain k-fold (with a warning) when a class has fewer than
    ``k`` members.
    """
    y = _labels(y, "y")
    n = y.size
    if k < 2:
        raise DomainError("k must be at least 2")
    if k > n:
        raise DomainError(f"k={k} exceeds {n} rows")
    classes = [c for c in (0, 1) if np.any(y == c)]
    if any(np.count_nonzero(y == c) < k for c in classes):
        warnings.warn(f"a class has fewer than k={k} members; using plain k-fold", RuntimeWarning)
        return kfold_indices(n, k, seed)
    folds = [[] for _ in range(k)]
    offset = 0
    for c in classes:
        members = np.flatnonzero(y == c)
        gen = RngStream(seed, f"stratify/class-{c}").generator()
        for pos, idx in enumerate(gen.permutation(members)):
            folds[(offset + pos) % k].append(int(idx))
        offset = (offset + members.size) % k
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


Model = Union[ModelSpec, EnsembleSpec]


def model_name(model: Model) -> str:
    return model.kind


def cross_validate(
    model: Model,
    d: Dataset,
    k: int = 5,
    seed: int = 42,
    scale_policy: str = PER_FOLD,
    stratified: bool = True,
    scale_columns=None,
) -> CvReport:
    """k-fold evaluation of a single spec or an ensemble.

    For an ensemble each member is fitted once per fold; the returned report
    carries one sub-report per member under ``members``. Fold ``i`` trains
    with stream ``RngStream(seed, "fold-i")`` and a child stream named after
    the member, so a member's numbers inside an ensemble equal its standalone
    run.
    """
    if scale_policy not in SCALE_POLICIES:
        raise DomainError(f"unknown scale policy {scale_policy!r}")
    y = d.targets
    folds = stratified_kfold_indices(y, k, seed) if stratified else kfold_indices(d.n, k, seed)
    columns = scale_columns
    global_scaler = None
    if scale_policy == GLOBAL:
        global_scaler = fit_scaler_matrix(d.rows, columns) if columns else fit_scaler_matrix(d.rows)

    if isinstance(model, EnsembleSpec):
        specs = list(model.members)
        labels = member_stream_labels(model)
    else:
        specs = [model]
        labels = [model.kind]

    n_members = len(specs)
    oof = np.zeros((n_members, d.n))
    for i, test_idx in enumerate(folds):
        train_mask = np.ones(d.n, dtype=bool)
        train_mask[test_idx] = False
        X_train, y_train = d.rows[train_mask], y[train_mask]
        X_test = d.rows[test_idx]
        scaler = global_scaler
        if scaler is None:
            scaler = fit_scaler_matrix(X_train, columns) if columns else fit_scaler_matrix(X_train)
        X_train, X_test = scaler.transform(X_train), scaler.transform(X_test)
        stream = RngStream(seed, f"fold-{i}")
        for m, (spec, label) in enumerate(zip(specs, labels)):
            try:
                fitted = fit_model(spec, X_train, y_train, stream.child(label))
            except HeartMLError as exc:
                raise FoldError(i, exc) from exc
            oof[m, test_idx] = predict_proba(fitted, X_test)

    def build(name, scores):
        per_fold = [score_predictions(y[idx], scores[idx]) for idx in folds]
        return CvReport(
            model_name=name,
            k=k,
            seed=seed,
            scale_policy=scale_policy,
            per_fold=per_fold,
            fold_sizes=[int(idx.size) for idx in folds],
            mean=mean_metrics(per_fold),
            pooled=score_predictions(y, scores),
            oof_scores=scores,
            targets=y,
        )

    if not isinstance(model, EnsembleSpec):
        return build(model.kind, oof[0])
    report = build(model.kind, combine(oof, model.mode, model.weights))
    report.members = {label: build(label, oof[m]) for m, label in enumerate(labels)}
    return report
