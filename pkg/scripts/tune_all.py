"""Grid search every kind over its shipped grid and print the winners."""
import argparse

from heartml.classifiers import KINDS, spec_to_text
from heartml.dataset import load_cleveland
from heartml.tuning import DEFAULT_GRIDS, OBJECTIVES, grid_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--objective", choices=OBJECTIVES, default="accuracy")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--kinds", nargs="+", choices=KINDS, default=[k for k in KINDS if k != "forest"])
    args = ap.parse_args()
    d = load_cleveland()
    for kind in args.kinds:
        r = grid_search(DEFAULT_GRIDS[kind], d, 5, args.seed, args.objective)
        print(f"{kind:7s} {r.best_score:.4f}  {spec_to_text(r.best_spec)}")


if __name__ == "__main__":
    main()
