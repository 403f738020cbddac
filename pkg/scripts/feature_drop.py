"""Real-data workflow: deviation on a CSV with and without some features.

Each run normalizes to unit variance, draws ``--repeats`` subsamples of
``--subsample`` rows without replacement and reports the median deviation.

    python3 scripts/feature_drop.py data.csv --target quality --drop alcohol
"""

import argparse

import numpy as np

from momentconf.harness import analyze_csv


def summarize(label, result, gamma):
    d = result.d_values
    print(f"{label:<28} median D = {np.median(d):.3f}   P(D > {gamma:g}) = {np.mean(d > gamma):.2f}")


def main():
    p = argparse.ArgumentParser()
    p.add_argument("csv")
    p.add_argument("--target", required=True)
    p.add_argument("--drop", action="append", default=[], help="feature(s) to drop, comma-separated")
    p.add_argument("--subsample", type=int, default=500)
    p.add_argument("--repeats", type=int, default=200)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    drop = [c.strip() for item in args.drop for c in item.split(",") if c.strip()]
    kw = dict(subsample_L=args.subsample, repeats=args.repeats, gamma=args.gamma, seed=args.seed)
    summarize("all features", analyze_csv(args.csv, args.target, **kw), args.gamma)
    if drop:
        summarize("without " + ",".join(drop), analyze_csv(args.csv, args.target, drop_columns=drop, **kw), args.gamma)


if __name__ == "__main__":
    main()
