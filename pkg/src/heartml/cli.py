"""``heartml`` command line.

Exit codes: 0 success, 2 usage / input / domain errors, 1 runtime failures.
Every failure prints exactly one ``heartml: error: ...`` line on stderr.
Outputs are computed in memory first and written only once everything
succeeded, under ``--out`` (default ``$HEARTML_OUT`` or ``./heartml-out``).
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import report as rpt
from .classifiers import KINDS, fit_model, make_spec, predict_label, spec_to_text
from .dataset import (
    ATTRIBUTE_NAMES,
    DROP_ROW,
    FEATURE_NAMES,
    FORMATS,
    HEADERED_CSV,
    MISSING_POLICIES,
    holdout_split,
    parse_records,
    summarize,
)
from .ensemble import HARD, SOFT, EnsembleSpec, fit_ensemble
from .errors import HeartMLError
from .evaluation import FOLD_MEAN, POOLED, cross_validate, roc_curve, score_predictions
from .persistence import data_hash, deserialize_model, serialize_model
from .preprocess import GLOBAL, PER_FOLD, fit_scaler, pearson_correlation
from .rng import RngStream
from .tuning import DEFAULT_GRIDS, OBJECTIVES, ParamGrid, grid_search

OUT_ENV = "HEARTML_OUT"
DEFAULT_OUT = "heartml-out"
SELECTORS = KINDS + ("soft-vote", "hard-vote")
COMMANDS = ("summarize", "corr", "cv", "tune", "train", "predict", "holdout-eval")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CommandConfig:
    command: str
    data_path: str | None = None
    format: str = HEADERED_CSV
    missing_policy: str = DROP_ROW
    seed: int = 42
    k: int = 5
    model: str = "soft-vote"
    scale_policy: str = PER_FOLD
    aggregation: str = FOLD_MEAN
    stratified: bool = True
    out: str = ""
    objective: str = "accuracy"
    test_fraction: float = 0.2
    model_file: str | None = None
    input: str | None = None
    grid: dict | None = None
    hyperparameters: dict[str, dict] = field(default_factory=dict)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="heartml", description="Heart-disease classifiers, voting ensembles and CV reports.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, data=True):
        if data:
            sp.add_argument("--data", dest="data_path", help="input table")
            sp.add_argument("--format", choices=FORMATS)
            sp.add_argument("--missing-policy", choices=MISSING_POLICIES)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
        sp.add_argument("--config", help="JSON file with option defaults and per-model hyperparameters")

    def modelling(sp):
        sp.add_argument("--model", choices=SELECTORS)
        sp.add_argument("--scale-policy", choices=(PER_FOLD, GLOBAL))

    sp = sub.add_parser("summarize", help="class / sex counts and feature ranges")
    common(sp)
    sp = sub.add_parser("corr", help="Pearson correlation matrix (corr.csv, corr.svg)")
    common(sp)
    sp = sub.add_parser("cv", help="k-fold cross-validation (report.csv, roc.csv, roc.svg)")
    common(sp)
    modelling(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--aggregation", choices=(FOLD_MEAN, POOLED))
    sp.add_argument("--plain", action="store_true", help="unstratified folds")
    sp = sub.add_parser("tune", help="grid search (leaderboard.csv)")
    common(sp)
    modelling(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--objective", choices=OBJECTIVES)
    sp.add_argument("--aggregation", choices=(FOLD_MEAN, POOLED))
    sp = sub.add_parser("train", help="fit on the whole table (model.json)")
    common(sp)
    modelling(sp)
    sp = sub.add_parser("predict", help="score rows with a saved model")
    sp.add_argument("--model-file", required=True)
    sp.add_argument("--input", required=True, help="headered CSV with the 13 feature columns")
    sp.add_argument("--config")
    sp = sub.add_parser("holdout-eval", help="stratified train/test split (report.csv, roc.csv, roc.svg)")
    common(sp)
    modelling(sp)
    sp.add_argument("--test-fraction", type=float)
    return p


def resolve_config(ns: argparse.Namespace) -> CommandConfig:
    cfg = CommandConfig(command=ns.command)
    cfg.out = os.environ.get(OUT_ENV, DEFAULT_OUT)
    config_path = getattr(ns, "config", None)
    if config_path:
        try:
            raw = json.loads(Path(config_path).read_text())
        except FileNotFoundError:
            raise UsageError(f"config file not found: {config_path}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in raw.items():
            attr = key.replace("-", "_")
            if attr == "data":
                attr = "data_path"
            if attr in ("command",) or not hasattr(cfg, attr):
                raise UsageError(f"unknown config key {key!r}")
            setattr(cfg, attr, value)
    for key, value in vars(ns).items():
        if key in ("command", "config") or value is None:
            continue
        if key == "plain":
            if value:
                cfg.stratified = False
            continue
        setattr(cfg, key, value)
    if cfg.command not in ("predict",) and not cfg.data_path:
        raise UsageError("--data is required")
    if cfg.model not in SELECTORS:
        raise UsageError(f"unknown model selector {cfg.model!r}")
    for kind in cfg.hyperparameters:
        if kind not in KINDS:
            raise UsageError(f"hyperparameters given for unknown kind {kind!r}")
    return cfg


def _spec(cfg: CommandConfig, kind: str):
    return make_spec(kind, **cfg.hyperparameters.get(kind, {}))


def _model_spec(cfg: CommandConfig, selector: str | None = None):
    selector = selector or cfg.model
    if selector in KINDS:
        return _spec(cfg, selector)
    mode = SOFT if selector == "soft-vote" else HARD
    return EnsembleSpec(tuple(_spec(cfg, k) for k in KINDS), mode)


def _load(cfg: CommandConfig):
    path = Path(cfg.data_path)
    if not path.is_file():
        raise UsageError(f"data file not found: {path}")
    raw = path.read_bytes()
    return parse_records(raw, cfg.format, cfg.missing_policy, source_name=str(path)), raw


def _cmd_summarize(cfg):
    d, _ = _load(cfg)
    s = summarize(d).to_dict()
    s["dropped_rows"] = d.provenance.dropped
    text = json.dumps(s, indent=2) + "\n"
    return {"summary.json": text}, text


def _cmd_corr(cfg):
    d, _ = _load(cfg)
    corr = pearson_correlation(d, include_target=True)
    return {"corr.csv": corr.to_csv(), "corr.svg": rpt.heatmap_svg(corr)}, None


def _cmd_cv(cfg):
    d, _ = _load(cfg)
    model = _model_spec(cfg)
    r = cross_validate(model, d, cfg.k, cfg.seed, cfg.scale_policy, cfg.stratified)
    reports = list(r.members.values()) + [r]
    curve = roc_curve(r.targets, r.oof_scores)
    curves = {rpt.ROW_NAMES[x.model_name]: x.roc() for x in reports}
    files = {
        "report.csv": rpt.table3_csv(reports, cfg.aggregation),
        "metrics.csv": rpt.metrics_csv(reports, cfg.aggregation),
        "folds.csv": rpt.folds_csv(reports),
        "roc.csv": rpt.roc_csv(curve),
        "roc.svg": rpt.roc_svg(curves, f"ROC, {cfg.k}-fold out-of-fold scores"),
    }
    return files, files["report.csv"]


def _cmd_tune(cfg):
    if cfg.model not in KINDS:
        raise UsageError("tune needs a single model kind, not a voting ensemble")
    d, _ = _load(cfg)
    grid = ParamGrid(cfg.model, cfg.grid) if cfg.grid is not None else DEFAULT_GRIDS[cfg.model]
    result = grid_search(grid, d, cfg.k, cfg.seed, cfg.objective, cfg.scale_policy, cfg.aggregation)
    msg = f"best {spec_to_text(result.best_spec)} {cfg.objective}={result.best_score:.4f}\n"
    return {"leaderboard.csv": result.to_csv()}, msg


def _cmd_train(cfg):
    d, raw = _load(cfg)
    scaler = fit_scaler(d)
    X = scaler.transform(d.rows)
    spec = _model_spec(cfg)
    stream = RngStream(cfg.seed, "train")
    if isinstance(spec, EnsembleSpec):
        model = fit_ensemble(spec, X, d.targets, stream)
    else:
        model = fit_model(spec, X, d.targets, stream.child(spec.kind))
    prov = {"data_sha256": data_hash(raw), "seed": cfg.seed, "rows": d.n, "format": cfg.format}
    return {"model.json": serialize_model(model, scaler, prov).decode()}, None


def _read_feature_rows(path: Path) -> np.ndarray:
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise UsageError("input file is empty")
    header = [c.strip() for c in next(csv.reader([lines[0]]))]
    unknown = [c for c in header if c not in ATTRIBUTE_NAMES]
    missing = [c for c in FEATURE_NAMES if c not in header]
    if unknown or missing:
        raise UsageError(f"input header must name the 13 features (unknown {unknown}, missing {missing})")
    order = [header.index(c) for c in FEATURE_NAMES]
    rows = []
    for no, line in enumerate(lines[1:], start=2):
        tokens = [t.strip() for t in line.split(",")]
        if len(tokens) != len(header):
            raise UsageError(f"input line {no}: expected {len(header)} fields")
        try:
            rows.append([float(tokens[j]) for j in order])
        except ValueError:
            raise UsageError(f"input line {no}: non-numeric value") from None
    return np.array(rows, dtype=float).reshape(-1, len(FEATURE_NAMES))


def _cmd_predict(cfg):
    path = Path(cfg.model_file)
    if not path.is_file():
        raise UsageError(f"model file not found: {path}")
    mf = deserialize_model(path.read_bytes())
    X = _read_feature_rows(Path(cfg.input))
    p = mf.predict_proba(X)
    lines = ["probability,label"] + [f"{v:.6f},{predict_label(float(v))}" for v in p]
    return {}, "\n".join(lines) + "\n"


def _cmd_holdout(cfg):
    d, _ = _load(cfg)
    train, test = holdout_split(d, cfg.test_fraction, cfg.seed, stratified=True)
    scaler = fit_scaler(train)
    X_train, X_test = scaler.transform(train.rows), scaler.transform(test.rows)
    mode = HARD if cfg.model == "hard-vote" else SOFT
    spec = EnsembleSpec(tuple(_spec(cfg, k) for k in KINDS), mode)
    ens = fit_ensemble(spec, X_train, train.targets, RngStream(cfg.seed, "holdout-eval"))
    scores = {m.kind: m.predict_proba(X_test) for m in ens.members}
    scores[ens.kind] = ens.predict_proba(X_test)
    buf = ["model,accuracy,precision,recall,f1,roc_auc"]
    curves = {}
    for name in rpt.TABLE3_ORDER:
        if name not in scores:
            continue
        m = score_predictions(test.targets, scores[name])
        buf.append(rpt.ROW_NAMES[name] + "," + ",".join(f"{v:.4f}" for v in m.as_dict().values()))
        curves[rpt.ROW_NAMES[name]] = roc_curve(test.targets, scores[name])
    selected = cfg.model
    files = {
        "report.csv": "\n".join(buf) + "\n",
        "roc.csv": rpt.roc_csv(roc_curve(test.targets, scores[selected])),
        "roc.svg": rpt.roc_svg(curves, f"ROC on held-out rows (n={test.n}, seed={cfg.seed})"),
    }
    return files, files["report.csv"]


_HANDLERS = {
    "summarize": _cmd_summarize,
    "corr": _cmd_corr,
    "cv": _cmd_cv,
    "tune": _cmd_tune,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "holdout-eval": _cmd_holdout,
}


def _fail(message: str, code: int) -> int:
    print(f"heartml: error: {' '.join(str(message).split())}", file=sys.stderr)
    return code


def run_command(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = resolve_config(ns)
        files, stdout = _HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        return _fail(str(exc), 2)
    except HeartMLError as exc:
        return _fail(f"{type(exc).__name__}: {exc}", 2)
    except Exception as exc:  # noqa: BLE001
        return _fail(f"{type(exc).__name__}: {exc}", 1)
    try:
        if files:
            out = Path(cfg.out)
            out.mkdir(parents=True, exist_ok=True)
            for name, text in files.items():
                (out / name).write_text(text)
    except OSError as exc:
        return _fail(f"cannot write outputs: {exc}", 1)
    if stdout:
        sys.stdout.write(stdout)
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
