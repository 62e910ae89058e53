"""Exhaustive grid search scored by cross-validation."""
from __future__ import annotations

import io
import itertools
from dataclasses import dataclass, field

from .classifiers import make_spec, spec_to_text
from .classifiers.specs import SPEC_TYPES, ModelSpec
from .dataset import Dataset
from .errors import DomainError, HeartMLError
from .evaluation import FOLD_MEAN, cross_validate
from .preprocess import PER_FOLD

OBJECTIVES = ("accuracy", "f1", "roc_auc")


@dataclass(frozen=True)
class ParamGrid:
    """Candidate values per hyperparameter, in declaration order.

    An empty list means "use the kind's default".
    """

    kind: str
    params: dict[str, list] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SPEC_TYPES:
            raise DomainError(f"unknown model kind {self.kind!r}")

    @property
    def size(self) -> int:
        n = 1
        for values in self.params.values():
            n *= max(len(values), 1)
        return n


@dataclass(frozen=True)
class LeaderboardEntry:
    spec: ModelSpec
    score: float
    grid_index: int
    failed: bool = False
    error: str = ""


@dataclass(frozen=True)
class SearchResult:
    best_spec: ModelSpec
    best_score: float
    leaderboard: tuple[LeaderboardEntry, ...]
    objective: str

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("rank,spec,objective,score\n")
        for rank, e in enumerate(self.leaderboard, start=1):
            text = spec_to_text(e.spec).replace('"', '""')
            buf.write(f'{rank},"{text}",{self.objective},{e.score:.6f}\n')
        return buf.getvalue()


def grid_expand(g: ParamGrid) -> list[ModelSpec]:
    """Cartesian product, first parameter varying slowest."""
    names = [name for name, values in g.params.items() if len(values) > 0]
    lists = [g.params[name] for name in names]
    specs = []
    for combo in itertools.product(*lists):
        specs.append(make_spec(g.kind, **dict(zip(names, combo))))
    return specs


# Small by design; the svm grid contains kernel=linear, gamma=auto, C=2.
DEFAULT_GRIDS: dict[str, ParamGrid] = {
    "logreg": ParamGrid("logreg", {"learning_rate": [0.1, 0.5], "l2_lambda": [0.0, 0.01, 0.1]}),
    "knn": ParamGrid("knn", {"k": [3, 5, 7, 9, 11, 15]}),
    "svm": ParamGrid("svm", {"kernel": ["linear", "rbf"], "C": [0.5, 1.0, 2.0], "gamma": ["auto"]}),
    "tree": ParamGrid("tree", {"max_depth": [None, 3, 5, 8], "min_samples_leaf": [1, 5]}),
    "gnb": ParamGrid("gnb", {"var_smoothing_eps": [1e-9, 1e-6, 1e-3]}),
    "forest": ParamGrid("forest", {"n_trees": [50, 100], "max_depth": [None, 5]}),
    "mlp": ParamGrid("mlp", {"hidden_units": [8, 16], "learning_rate": [0.01, 0.1], "epochs": [300, 1000]}),
}


def grid_search(
    g: ParamGrid,
    d: Dataset,
    k: int = 5,
    seed: int = 42,
    objective: str = "accuracy",
    scale_policy: str = PER_FOLD,
    aggregation: str = FOLD_MEAN,
) -> SearchResult:
    if objective not in OBJECTIVES:
        raise DomainError(f"objective must be one of {OBJECTIVES}")
    candidates = grid_expand(g)
    if not candidates:
        raise DomainError("grid is empty")
    entries = []
    for i, spec in enumerate(candidates):
        try:
            report = cross_validate(spec, d, k, seed, scale_policy)
            entries.append(LeaderboardEntry(spec, getattr(report.headline(aggregation), objective), i))
        except HeartMLError as exc:
            entries.append(LeaderboardEntry(spec, 0.0, i, failed=True, error=str(exc)))
    # sorted() is stable, so equal scores keep grid order
    board = tuple(sorted(entries, key=lambda e: -e.score))
    best = board[0]
    return SearchResult(best.spec, best.score, board, objective)
