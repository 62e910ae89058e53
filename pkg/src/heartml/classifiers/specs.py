"""Hyperparameter records, one frozen dataclass per classifier kind."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import ClassVar, Union

from ..errors import DomainError


def _require(cond: bool, kind: str, param: str, value) -> None:
    if not cond:
        raise DomainError(f"{kind}: invalid value for {param}: {value!r}")


@dataclass(frozen=True)
class LogRegSpec:
    kind: ClassVar[str] = "logreg"
    learning_rate: float = 0.1
    max_iters: int = 1000
    tolerance: float = 1e-6
    l2_lambda: float = 0.0

    def __post_init__(self):
        _require(self.learning_rate > 0, self.kind, "learning_rate", self.learning_rate)
        _require(int(self.max_iters) >= 1, self.kind, "max_iters", self.max_iters)
        _require(self.tolerance >= 0, self.kind, "tolerance", self.tolerance)
        _require(self.l2_lambda >= 0, self.kind, "l2_lambda", self.l2_lambda)


@dataclass(frozen=True)
class KnnSpec:
    kind: ClassVar[str] = "knn"
    k: int = 5

    def __post_init__(self):
        _require(isinstance(self.k, int) and self.k >= 1, self.kind, "k", self.k)


@dataclass(frozen=True)
class SvmSpec:
    kind: ClassVar[str] = "svm"
    kernel: str = "linear"
    C: float = 1.0
    gamma: Union[str, float] = "auto"
    tolerance: float = 1e-3
    max_passes: int = 100  # pair updates are capped at max_passes * n_rows

    def __post_init__(self):
        _require(self.kernel in ("linear", "rbf"), self.kind, "kernel", self.kernel)
        _require(self.C > 0 and math.isfinite(self.C), self.kind, "C", self.C)
        _require(
            self.gamma == "auto" or (isinstance(self.gamma, (int, float)) and self.gamma > 0),
            self.kind, "gamma", self.gamma,
        )
        _require(self.tolerance > 0, self.kind, "tolerance", self.tolerance)
        _require(int(self.max_passes) >= 1, self.kind, "max_passes", self.max_passes)


@dataclass(frozen=True)
class TreeSpec:
    kind: ClassVar[str] = "tree"
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1

    def __post_init__(self):
        _require(self.max_depth is None or self.max_depth >= 1, self.kind, "max_depth", self.max_depth)
        _require(self.min_samples_split >= 2, self.kind, "min_samples_split", self.min_samples_split)
        _require(self.min_samples_leaf >= 1, self.kind, "min_samples_leaf", self.min_samples_leaf)


@dataclass(frozen=True)
class GnbSpec:
    kind: ClassVar[str] = "gnb"
    var_smoothing_eps: float = 1e-9

    def __post_init__(self):
        _require(self.var_smoothing_eps >= 0, self.kind, "var_smoothing_eps", self.var_smoothing_eps)


@dataclass(frozen=True)
class ForestSpec:
    kind: ClassVar[str] = "forest"
    n_trees: int = 100
    bootstrap: bool = True
    features_per_split: Union[str, int] = "sqrt"
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1

    def __post_init__(self):
        _require(self.n_trees >= 1, self.kind, "n_trees", self.n_trees)
        fps = self.features_per_split
        _require(
            fps in ("sqrt", "all") or (isinstance(fps, int) and not isinstance(fps, bool) and fps >= 1),
            self.kind, "features_per_split", fps,
        )
        self.tree_spec()  # validates the shared tree parameters

    def tree_spec(self) -> TreeSpec:
        return TreeSpec(self.max_depth, self.min_samples_split, self.min_samples_leaf)

    def n_candidates(self, n_features: int) -> int:
        if self.features_per_split == "all":
            return n_features
        if self.features_per_split == "sqrt":
            return math.ceil(math.sqrt(n_features))
        return min(int(self.features_per_split), n_features)


@dataclass(frozen=True)
class MlpSpec:
    kind: ClassVar[str] = "mlp"
    hidden_units: int = 16
    activation: str = "relu"
    learning_rate: float = 0.01
    epochs: int = 300
    batch: str = "full"
    init_scale: float | None = None  # None -> sqrt(6 / (fan_in + fan_out)) per layer

    def __post_init__(self):
        _require(self.hidden_units >= 1, self.kind, "hidden_units", self.hidden_units)
        _require(self.activation in ("relu", "logistic"), self.kind, "activation", self.activation)
        _require(self.learning_rate > 0, self.kind, "learning_rate", self.learning_rate)
        _require(self.epochs >= 1, self.kind, "epochs", self.epochs)
        _require(self.batch == "full", self.kind, "batch", self.batch)
        _require(self.init_scale is None or self.init_scale > 0, self.kind, "init_scale", self.init_scale)


ModelSpec = Union[LogRegSpec, KnnSpec, SvmSpec, TreeSpec, GnbSpec, ForestSpec, MlpSpec]

SPEC_TYPES: dict[str, type] = {
    cls.kind: cls
    for cls in (LogRegSpec, KnnSpec, SvmSpec, TreeSpec, GnbSpec, ForestSpec, MlpSpec)
}
KINDS: tuple[str, ...] = ("logreg", "knn", "svm", "tree", "gnb", "mlp", "forest")


def default_spec(kind: str) -> ModelSpec:
    return make_spec(kind)


def make_spec(kind: str, **params) -> ModelSpec:
    try:
        cls = SPEC_TYPES[kind]
    except KeyError:
        raise DomainError(f"unknown model kind {kind!r}") from None
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(params) - names
    if unknown:
        raise DomainError(f"{kind}: unknown hyperparameter(s) {sorted(unknown)}")
    try:
        return cls(**params)
    except TypeError as exc:
        raise DomainError(f"{kind}: {exc}") from None


def spec_to_dict(spec: ModelSpec) -> dict:
    return {"kind": spec.kind, "params": dataclasses.asdict(spec)}


def spec_from_dict(obj: dict) -> ModelSpec:
    return make_spec(obj["kind"], **obj.get("params", {}))


def spec_to_text(spec: ModelSpec) -> str:
    """Canonical one-line form, e.g. ``svm(kernel=linear,C=2.0,...)``."""
    parts = []
    for f in dataclasses.fields(spec):
        value = getattr(spec, f.name)
        parts.append(f"{f.name}={value}")
    return f"{spec.kind}({','.join(parts)})"
