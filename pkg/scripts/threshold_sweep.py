"""TPR/FPR against the decision threshold, using configs/sweep.json.

    python3 scripts/threshold_sweep.py --out results/sweep
"""

import argparse
import json
from pathlib import Path

from momentconf.fileio import write_rows
from momentconf.harness import ExperimentConfig, parse_range, threshold_sweep

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "sweep.json"


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--config", default=str(CONFIG))
    p.add_argument("--out", default="results/sweep")
    args = p.parse_args()
    raw = json.loads(Path(args.config).read_text())
    gammas = parse_range(raw.pop("gammas", "0:1:0.02"))
    runs_per_class = raw.pop("runs_per_class", None)
    results = threshold_sweep(ExperimentConfig.from_dict(raw), gammas, runs_per_class)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = [r for res in results for r in res.rows()]
    write_rows(out / "sweep.csv", ["n", "gamma", "tpr", "fpr"], rows)
    for res in results:
        i = list(res.gammas).index(res.best_gamma)
        print(f"n={res.n}: best gamma {res.best_gamma:.2f} (TPR {res.tpr[i]:.2f}, FPR {res.fpr[i]:.2f})")


if __name__ == "__main__":
    main()
