"""Z-score scaling of the continuous columns and Pearson correlation."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .dataset import ATTRIBUTE_NAMES, CONTINUOUS_COLUMNS, FEATURE_NAMES, Dataset
from .errors import DomainError

PER_FOLD = "per-fold"
GLOBAL = "global"
SCALE_POLICIES = (PER_FOLD, GLOBAL)


@dataclass(frozen=True)
class Scaler:
    column_ids: tuple[int, ...]
    means: tuple[float, ...]
    stddevs: tuple[float, ...]
    fitted_on: int

    @property
    def degenerate(self) -> tuple[bool, ...]:
        """True for columns whose training stddev was zero (centred only)."""
        return tuple(s == 0.0 for s in self.stddevs)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.array(X, dtype=float, copy=True)
        if X.ndim != 2:
            raise DomainError("expected a 2-D matrix")
        for col, mean, std in zip(self.column_ids, self.means, self.stddevs):
            if col >= X.shape[1]:
                raise DomainError(f"scaler column {col} outside matrix width {X.shape[1]}")
            X[:, col] = (X[:, col] - mean) / (std if std > 0 else 1.0)
        return X

    def to_dict(self) -> dict:
        return {
            "column_ids": list(self.column_ids),
            "means": list(self.means),
            "stddevs": list(self.stddevs),
            "fitted_on": self.fitted_on,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Scaler":
        return cls(
            tuple(int(c) for c in obj["column_ids"]),
            tuple(float(m) for m in obj["means"]),
            tuple(float(s) for s in obj["stddevs"]),
            int(obj["fitted_on"]),
        )


def fit_scaler_matrix(X: np.ndarray, columns=CONTINUOUS_COLUMNS) -> Scaler:
    X = np.asarray(X, dtype=float)
    columns = tuple(int(c) for c in columns)
    if not columns:
        raise DomainError("scaler needs at least one column")
    if X.shape[0] == 0:
        raise DomainError("cannot fit a scaler on zero rows")
    sub = X[:, list(columns)]
    means = sub.mean(axis=0)
    stds = sub.std(axis=0)  # population statistics (divisor n)
    # rounding in the mean can leave a constant column with a 1-ulp spread
    constant = np.ptp(sub, axis=0) == 0
    means = np.where(constant, sub[0], means)
    stds = np.where(constant, 0.0, stds)
    return Scaler(columns, tuple(means.tolist()), tuple(stds.tolist()), X.shape[0])


def fit_scaler(train: Dataset, columns=CONTINUOUS_COLUMNS) -> Scaler:
    return fit_scaler_matrix(train.rows, columns)


def apply_scaler(s: Scaler, d: Dataset) -> Dataset:
    return d.with_rows(s.transform(d.rows))


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple[str, ...]
    values: np.ndarray
    degenerate: tuple[bool, ...]  # per column; pairs touching one are 0

    def get(self, a: str, b: str) -> float:
        return float(self.values[self.labels.index(a), self.labels.index(b)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("," + ",".join(self.labels) + "\n")
        for label, row in zip(self.labels, self.values):
            buf.write(label + "," + ",".join(f"{v:.6f}" for v in row) + "\n")
        return buf.getvalue()


def correlation_matrix(M: np.ndarray, labels) -> CorrelationMatrix:
    M = np.asarray(M, dtype=float)
    if M.shape[0] < 2:
        raise DomainError("correlation needs at least 2 rows")
    centred = M - M.mean(axis=0)
    ss = np.sqrt((centred**2).sum(axis=0))
    degenerate = ss == 0
    safe = np.where(degenerate, 1.0, ss)
    z = centred / safe
    values = z.T @ z
    values[degenerate, :] = 0.0
    values[:, degenerate] = 0.0
    np.clip(values, -1.0, 1.0, out=values)
    values = (values + values.T) / 2
    diag = np.where(degenerate, 0.0, 1.0)
    np.fill_diagonal(values, diag)
    values.flags.writeable = False
    return CorrelationMatrix(tuple(labels), values, tuple(bool(x) for x in degenerate))


def pearson_correlation(d: Dataset, include_target: bool = True) -> CorrelationMatrix:
    if d.n < 2:
        raise DomainError("correlation needs at least 2 rows")
    if include_target:
        M = np.column_stack([d.rows, d.targets.astype(float)])
        labels = ATTRIBUTE_NAMES
    else:
        M, labels = d.rows, FEATURE_NAMES
    return correlation_matrix(M, labels)
