"""Canonical JSON model files.

Layout (keys always in this order)::

    {"schema_version":1,"created":...,"model":{...},"scaler":{...}|null,
     "provenance":{...}}

Floats are written with 17 significant digits so a round trip reproduces
every parameter bit for bit.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from datetime import datetime, timezone

import numpy as np

from .classifiers import FittedModel, forest, gnb, knn, logreg, mlp, svm, tree
from .classifiers.specs import SPEC_TYPES, spec_from_dict, spec_to_dict
from .ensemble import EnsembleModel
from .errors import DomainError, FormatError
from .preprocess import Scaler

SCHEMA_VERSION = 1

_PARAM_TYPES = {
    "logreg": logreg.LogRegParams,
    "knn": knn.KnnParams,
    "svm": svm.SvmParams,
    "tree": tree.TreeParams,
    "gnb": gnb.GnbParams,
    "mlp": mlp.MlpParams,
}


def canonical_dumps(obj) -> str:
    """JSON text with insertion-ordered keys and 17-digit floats."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise DomainError(f"cannot serialize non-finite number {x}")
        text = format(x, ".17g")
        if not any(c in text for c in ".en"):
            text += ".0"  # keep floats distinguishable from ints
        return text
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{canonical_dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_dumps(v) for v in obj) + "]"
    raise DomainError(f"cannot serialize {type(obj).__name__}")


def _encode_value(v):
    if isinstance(v, np.ndarray):
        return {"dtype": str(v.dtype), "shape": list(v.shape), "data": v.ravel().tolist()}
    return v


def _decode_value(v):
    if isinstance(v, dict) and set(v) == {"dtype", "shape", "data"}:
        if v["dtype"] not in ("float64", "int64"):
            raise FormatError(f"unsupported array dtype {v['dtype']!r}")
        return np.array(v["data"], dtype=v["dtype"]).reshape(v["shape"])
    return v


def _encode_params(params) -> dict:
    return {f.name: _encode_value(getattr(params, f.name)) for f in dataclasses.fields(params)}


def _decode_params(cls, obj: dict):
    names = [f.name for f in dataclasses.fields(cls)]
    if set(obj) != set(names):
        raise FormatError(f"{cls.__name__}: expected fields {names}, got {sorted(obj)}")
    return cls(**{n: _decode_value(obj[n]) for n in names})


def encode_model(m) -> dict:
    if isinstance(m, EnsembleModel):
        return {
            "kind": "ensemble",
            "mode": m.mode,
            "weights": list(m.weights),
            "members": [encode_model(x) for x in m.members],
        }
    spec = spec_to_dict(m.spec)
    if m.kind == "forest":
        learned = {
            "trees": [_encode_params(t) for t in m.learned.trees],
            "labels": list(m.learned.labels),
        }
    else:
        learned = _encode_params(m.learned)
    return {"kind": m.kind, "spec": spec["params"], "n_features": m.n_features, "learned": learned}


def decode_model(obj: dict):
    try:
        kind = obj["kind"]
        if kind == "ensemble":
            members = tuple(decode_model(x) for x in obj["members"])
            return EnsembleModel(members, obj["mode"], tuple(obj["weights"]))
        if kind not in SPEC_TYPES:
            raise FormatError(f"unknown model kind {kind!r} in schema version {SCHEMA_VERSION}")
        spec = spec_from_dict({"kind": kind, "params": obj["spec"]})
        learned = obj["learned"]
        if kind == "forest":
            params = forest.ForestParams(
                tuple(_decode_params(tree.TreeParams, t) for t in learned["trees"]),
                tuple(learned["labels"]),
            )
        else:
            params = _decode_params(_PARAM_TYPES[kind], learned)
        return FittedModel(spec, params, int(obj["n_features"]))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model record: {exc}") from None


def data_hash(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def serialize_model(m, scaler: Scaler | None = None, provenance: dict | None = None,
                    created: str | None = None) -> bytes:
    if created is None:
        created = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "created": created,
        "model": encode_model(m),
        "scaler": scaler.to_dict() if scaler is not None else None,
        "provenance": provenance or {},
    }
    return (canonical_dumps(doc) + "\n").encode("utf-8")


@dataclasses.dataclass(frozen=True)
class ModelFile:
    model: object
    scaler: Scaler | None
    created: str
    provenance: dict

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.scaler is not None:
            X = self.scaler.transform(X)
        return self.model.predict_proba(X)


def deserialize_model(raw: bytes) -> ModelFile:
    try:
        doc = json.loads(raw.decode("utf-8") if isinstance(raw, bytes) else raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema_version {doc.get('schema_version') if isinstance(doc, dict) else None!r}")
    model = decode_model(doc.get("model") or {})
    scaler = Scaler.from_dict(doc["scaler"]) if doc.get("scaler") else None
    return ModelFile(model, scaler, doc.get("created", ""), doc.get("provenance", {}))
