"""Heart-disease table: schema, parsing, summaries and hold-out splits.

Two wire formats are understood:

``raw-uci``
    The ``processed.cleveland.data`` layout: 14 comma separated numbers per
    line, no header, ``?`` marks a missing value, target coded 0-4.
``headered-csv``
    A header naming the 14 schema columns (any order) followed by numeric
    rows; the target is already 0/1.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DomainError, EmptyDatasetError, ParseError, SchemaError
from .rng import RngStream

RAW_UCI = "raw-uci"
HEADERED_CSV = "headered-csv"
FORMATS = (RAW_UCI, HEADERED_CSV)
DROP_ROW = "drop-row"
ERROR = "error"
MISSING_POLICIES = (DROP_ROW, ERROR)
MISSING_MARKER = "?"


@dataclass(frozen=True)
class AttributeSchema:
    id: int
    name: str
    kind: str  # continuous | categorical | binary
    allowed_values: tuple | None = None  # None means any finite real
    description: str = ""

    def accepts(self, value: float) -> bool:
        if self.allowed_values is None:
            return math.isfinite(value)
        return value in self.allowed_values


# Codes follow the UCI documentation. Recoded zero-based variants of cp,
# slope, ca and thal that circulate as "heart.csv" are accepted by the
# headered-csv reader through HEADERED_EXTRA_CODES below.
SCHEMA: tuple[AttributeSchema, ...] = (
    AttributeSchema(1, "age", "continuous", None, "age in years"),
    AttributeSchema(2, "sex", "binary", (0, 1), "0 = female, 1 = male"),
    AttributeSchema(3, "cp", "categorical", (1, 2, 3, 4), "chest pain type"),
    AttributeSchema(4, "trestbps", "continuous", None, "resting blood pressure"),
    AttributeSchema(5, "chol", "continuous", None, "serum cholesterol mg/dl"),
    AttributeSchema(6, "fbs", "binary", (0, 1), "fasting blood sugar > 120 mg/dl"),
    AttributeSchema(7, "restecg", "categorical", (0, 1, 2), "resting ECG"),
    AttributeSchema(8, "thalach", "continuous", None, "maximum heart rate"),
    AttributeSchema(9, "exang", "binary", (0, 1), "exercise induced angina"),
    AttributeSchema(10, "oldpeak", "continuous", None, "ST depression"),
    AttributeSchema(11, "slope", "categorical", (1, 2, 3), "peak ST slope"),
    AttributeSchema(12, "ca", "categorical", (0, 1, 2, 3), "vessels coloured"),
    AttributeSchema(13, "thal", "categorical", (3, 6, 7), "thallium defect type"),
    AttributeSchema(14, "target", "binary", (0, 1), "0 = healthy, 1 = defect"),
)

FEATURES: tuple[AttributeSchema, ...] = SCHEMA[:13]
FEATURE_NAMES: tuple[str, ...] = tuple(a.name for a in FEATURES)
ATTRIBUTE_NAMES: tuple[str, ...] = tuple(a.name for a in SCHEMA)
CONTINUOUS_COLUMNS: tuple[int, ...] = tuple(
    i for i, a in enumerate(FEATURES) if a.kind == "continuous"
)
N_FEATURES = len(FEATURES)

HEADERED_EXTRA_CODES = {
    "cp": (0,),
    "slope": (0,),
    "ca": (4,),
    "thal": (0, 1, 2),
}


@dataclass(frozen=True)
class Provenance:
    source: str
    format: str
    missing_policy: str
    dropped: int = 0


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable feature matrix (n x 13) plus binary targets."""

    rows: np.ndarray
    targets: np.ndarray
    provenance: Provenance = field(
        default_factory=lambda: Provenance("<memory>", "memory", DROP_ROW)
    )

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float).reshape(-1, N_FEATURES) if len(self.rows) else np.empty((0, N_FEATURES))
        targets = np.array(self.targets, dtype=np.int64).reshape(-1)
        if rows.shape[0] != targets.shape[0]:
            raise DomainError(f"{rows.shape[0]} rows but {targets.shape[0]} targets")
        if not np.all(np.isin(targets, (0, 1))):
            raise DomainError("targets must be 0 or 1")
        if not np.all(np.isfinite(rows)):
            raise DomainError("rows contain non-finite entries")
        rows.flags.writeable = False
        targets.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "targets", targets)

    @property
    def n(self) -> int:
        return int(self.targets.shape[0])

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.rows, other.rows) and np.array_equal(
            self.targets, other.targets
        )

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.rows[idx], self.targets[idx], self.provenance)

    def with_rows(self, rows: np.ndarray) -> "Dataset":
        return Dataset(rows, self.targets, self.provenance)


@dataclass(frozen=True)
class DatasetSummary:
    n_rows: int
    class_counts: tuple[int, int]
    class_fractions: tuple[float, float]
    sex_counts: tuple[int, int]  # (female, male)
    feature_min: dict[str, float]
    feature_max: dict[str, float]
    feature_mean: dict[str, float]
    feature_std: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "n_rows": self.n_rows,
            "class_counts": {"healthy": self.class_counts[0], "defect": self.class_counts[1]},
            "class_fractions": {"healthy": self.class_fractions[0], "defect": self.class_fractions[1]},
            "sex_counts": {"female": self.sex_counts[0], "male": self.sex_counts[1]},
            "features": {
                name: {
                    "min": self.feature_min[name],
                    "max": self.feature_max[name],
                    "mean": self.feature_mean[name],
                    "std": self.feature_std[name],
                }
                for name in FEATURE_NAMES
            },
        }


def binarize_target(raw) -> int:
    """Collapse the 0-4 severity code to healthy (0) / defect (1)."""
    value = float(raw)
    if not value.is_integer() or not 0 <= value <= 4:
        raise DomainError(f"raw target {raw!r} outside 0..4")
    return 0 if value == 0 else 1


def _parse_number(token: str, line_no: int, column: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric token {token!r} in column {column}", line_no) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token!r} in column {column}", line_no)
    return value


def _check_feature(attr: AttributeSchema, value: float, line_no: int, extra=()) -> None:
    if attr.accepts(value) or value in extra:
        return
    raise SchemaError(
        f"line {line_no}: {attr.name}={value:g} outside allowed values {attr.allowed_values}"
    )


def parse_records(
    source,
    format: str = HEADERED_CSV,
    missing_policy: str = DROP_ROW,
    source_name: str = "<stream>",
) -> Dataset:
    """Parse ``source`` (bytes, text, or a binary/text stream) into a Dataset."""
    if format not in FORMATS:
        raise DomainError(f"unknown format {format!r}; expected one of {FORMATS}")
    if missing_policy not in MISSING_POLICIES:
        raise DomainError(f"unknown missing policy {missing_policy!r}")
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8 text ({exc})") from None

    lines = [(i + 1, ln.strip()) for i, ln in enumerate(source.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise EmptyDatasetError("input contains no records")

    if format == HEADERED_CSV:
        header_no, header = lines[0]
        names = [c.strip() for c in next(csv.reader([header]))]
        unknown = [c for c in names if c not in ATTRIBUTE_NAMES]
        if unknown:
            raise SchemaError(f"line {header_no}: unknown column(s) {unknown}")
        missing = [c for c in ATTRIBUTE_NAMES if c not in names]
        if missing or len(names) != len(set(names)):
            raise SchemaError(f"line {header_no}: header must name each of {ATTRIBUTE_NAMES} once")
        order = [names.index(c) for c in ATTRIBUTE_NAMES]
        body = lines[1:]
    else:
        order = list(range(len(SCHEMA)))
        body = lines

    rows, targets, dropped = [], [], 0
    for line_no, text in body:
        tokens = [t.strip() for t in text.split(",")]
        if len(tokens) != len(SCHEMA):
            raise ParseError(f"expected {len(SCHEMA)} fields, found {len(tokens)}", line_no)
        tokens = [tokens[j] for j in order]
        if MISSING_MARKER in tokens:
            if missing_policy == ERROR:
                col = ATTRIBUTE_NAMES[tokens.index(MISSING_MARKER)]
                raise ParseError(f"missing value in column {col}", line_no)
            # still reject garbage in the other fields
            for tok, attr in zip(tokens, SCHEMA):
                if tok != MISSING_MARKER:
                    _parse_number(tok, line_no, attr.name)
            dropped += 1
            continue
        values = [_parse_number(t, line_no, a.name) for t, a in zip(tokens, SCHEMA)]
        for attr, value in zip(FEATURES, values[:13]):
            extra = HEADERED_EXTRA_CODES.get(attr.name, ()) if format == HEADERED_CSV else ()
            _check_feature(attr, value, line_no, extra)
        raw_target = values[13]
        if format == RAW_UCI:
            try:
                target = binarize_target(raw_target)
            except DomainError as exc:
                raise ParseError(str(exc), line_no) from None
        else:
            if raw_target not in (0.0, 1.0):
                raise SchemaError(f"line {line_no}: target {raw_target:g} is not 0/1")
            target = int(raw_target)
        rows.append(values[:13])
        targets.append(target)

    if not rows and dropped == 0:
        raise EmptyDatasetError("input contains no records")
    prov = Provenance(source_name, format, missing_policy, dropped)
    return Dataset(np.array(rows, dtype=float).reshape(-1, N_FEATURES), np.array(targets, dtype=np.int64), prov)


def load_dataset(path, format: str = HEADERED_CSV, missing_policy: str = DROP_ROW) -> Dataset:
    path = Path(path)
    return parse_records(path.read_bytes(), format, missing_policy, source_name=str(path))


def _fmt(value: float) -> str:
    return repr(float(value))


def to_headered_csv(d: Dataset) -> str:
    buf = io.StringIO()
    buf.write(",".join(ATTRIBUTE_NAMES) + "\n")
    for row, target in zip(d.rows, d.targets):
        buf.write(",".join(_fmt(v) for v in row) + f",{int(target)}\n")
    return buf.getvalue()


def summarize(d: Dataset) -> DatasetSummary:
    if d.n == 0:
        raise EmptyDatasetError("cannot summarize an empty dataset")
    n1 = int(np.count_nonzero(d.targets == 1))
    n0 = d.n - n1
    sex = d.rows[:, FEATURE_NAMES.index("sex")]
    male = int(np.count_nonzero(sex == 1))
    X = d.rows
    return DatasetSummary(
        n_rows=d.n,
        class_counts=(n0, n1),
        class_fractions=(n0 / d.n, n1 / d.n),
        sex_counts=(d.n - male, male),
        feature_min=dict(zip(FEATURE_NAMES, X.min(axis=0).tolist())),
        feature_max=dict(zip(FEATURE_NAMES, X.max(axis=0).tolist())),
        feature_mean=dict(zip(FEATURE_NAMES, X.mean(axis=0).tolist())),
        feature_std=dict(zip(FEATURE_NAMES, X.std(axis=0).tolist())),
    )


def _stratified_test_counts(counts: dict[int, int], test_fraction: float) -> dict[int, int]:
    n = sum(counts.values())
    n_test = math.floor(n * test_fraction + 0.5)
    per_class = {c: math.floor(k * test_fraction) for c, k in counts.items()}
    remainder = n_test - sum(per_class.values())
    # larger class first; equal sizes go to the lower label
    for c in sorted(counts, key=lambda c: (-counts[c], c)):
        if remainder <= 0:
            break
        if per_class[c] < counts[c]:
            per_class[c] += 1
            remainder -= 1
    return per_class


def holdout_split(
    d: Dataset, test_fraction: float, seed: int, stratified: bool = True
) -> tuple[Dataset, Dataset]:
    """Seeded train/test partition; stratified by class unless told otherwise."""
    if not 0 < test_fraction < 1:
        raise DomainError(f"test_fraction {test_fraction} outside (0, 1)")
    gen = RngStream(seed, "holdout").generator()
    if stratified:
        counts = {c: int(np.count_nonzero(d.targets == c)) for c in (0, 1) if np.any(d.targets == c)}
        per_class = _stratified_test_counts(counts, test_fraction)
        test_idx = []
        for c in sorted(counts):
            members = np.flatnonzero(d.targets == c)
            test_idx.extend(gen.permutation(members)[: per_class[c]].tolist())
        test_idx = np.sort(np.array(test_idx, dtype=np.int64))
    else:
        n_test = math.floor(d.n * test_fraction + 0.5)
        test_idx = np.sort(gen.permutation(d.n)[:n_test])
    mask = np.zeros(d.n, dtype=bool)
    mask[test_idx] = True
    train_idx = np.flatnonzero(~mask)
    if len(test_idx) < 1 or len(train_idx) < 1:
        raise DomainError("split leaves an empty train or test set")
    return d.subset(train_idx), d.subset(test_idx)


def from_arrays(rows: Iterable, targets: Iterable) -> Dataset:
    return Dataset(np.asarray(rows, dtype=float), np.asarray(targets, dtype=np.int64))


def bundled_cleveland_path() -> Path:
    """Path of the bundled UCI Cleveland records (raw-uci layout, 303 lines).

    The copy shipped here carries the target already collapsed to 0/1.
    """
    from importlib.resources import files

    return Path(str(files("heartml") / "data" / "processed.cleveland.data"))


def load_cleveland(missing_policy: str = DROP_ROW) -> Dataset:
    return load_dataset(bundled_cleveland_path(), RAW_UCI, missing_policy)
