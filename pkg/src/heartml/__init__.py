"""Heart-disease classification: seven base learners, voting ensembles,
cross-validated evaluation and report emission."""

from .classifiers import FittedModel, default_spec, fit_model, make_spec, predict_label, predict_proba
from .dataset import Dataset, load_cleveland, load_dataset, parse_records, summarize
from .ensemble import EnsembleModel, EnsembleSpec, fit_ensemble
from .evaluation import cross_validate, roc_curve
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "Dataset", "EnsembleModel", "EnsembleSpec", "FittedModel", "RngStream",
    "cross_validate", "default_spec", "fit_ensemble", "fit_model", "load_cleveland",
    "load_dataset", "make_spec", "parse_records", "predict_label", "predict_proba",
    "roc_curve", "summarize",
]
