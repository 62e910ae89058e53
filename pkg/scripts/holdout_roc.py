"""Held-out ROC curves over several split seeds.

Rankings on a ~60-row test split move with the seed; this prints the
per-seed AUC of every model so the spread is visible.

    python scripts/holdout_roc.py --seeds 0 1 2 3 4
"""
import argparse

import numpy as np

from heartml.classifiers import KINDS
from heartml.dataset import FORMATS, HEADERED_CSV, holdout_split, load_cleveland, load_dataset
from heartml.ensemble import EnsembleSpec, fit_ensemble
from heartml.evaluation import roc_curve
from heartml.preprocess import fit_scaler
from heartml.rng import RngStream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data")
    ap.add_argument("--format", choices=FORMATS, default=HEADERED_CSV)
    ap.add_argument("--test-fraction", type=float, default=0.2)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    args = ap.parse_args()

    d = load_dataset(args.data, args.format) if args.data else load_cleveland()
    names = list(KINDS) + ["soft-vote"]
    table = []
    for seed in args.seeds:
        train, test = holdout_split(d, args.test_fraction, seed)
        scaler = fit_scaler(train)
        ens = fit_ensemble(EnsembleSpec(), scaler.transform(train.rows), train.targets, RngStream(seed, "holdout-eval"))
        X_test = scaler.transform(test.rows)
        scores = [m.predict_proba(X_test) for m in ens.members] + [ens.predict_proba(X_test)]
        table.append([roc_curve(test.targets, s).auc for s in scores])
    table = np.array(table)
    print("seed," + ",".join(names))
    for seed, row in zip(args.seeds, table):
        print(f"{seed}," + ",".join(f"{v:.4f}" for v in row))
    print("mean," + ",".join(f"{v:.4f}" for v in table.mean(axis=0)))


if __name__ == "__main__":
    main()
