"""Archetypal vs random splits on the planted-outlier synthetic, as a table.

    python3 scripts/synthetic_sweep.py [--seeds 20] [--fractions 0.1,0.2,0.3,0.4,0.5]
"""
import argparse

from archsplit.harness import sweep
from archsplit.splitmetrics import METRIC_NAMES
from archsplit.synthetic import planted_outliers


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--fractions", default="0.1,0.2,0.3,0.4,0.5")
    args = ap.parse_args()
    fractions = [float(f) for f in args.fractions.split(",")]

    X, _ = planted_outliers()
    print(f"{'frac':>5} {'metric':>12} {'archetypal':>11} {'random':>18}")
    for r in sweep(X, fractions, n_seeds=args.seeds):
        bm = r.benchmake.as_dict()
        for m in METRIC_NAMES:
            rnd = f"{r.random_mean[m]:.4f} ± {r.random_std[m]:.4f}"
            print(f"{r.fraction:>5} {m:>12} {bm[m]:>11.4f} {rnd:>18}")


if __name__ == "__main__":
    main()
