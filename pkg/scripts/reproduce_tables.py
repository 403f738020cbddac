"""Run every accuracy-table config in configs/ and collect one wide CSV.

    python3 scripts/reproduce_tables.py --out results/tables [--runs 50]
"""

import argparse
import json
from pathlib import Path

from momentconf.fileio import write_rows
from momentconf.harness import ExperimentConfig, run_benchmark

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--out", default="results/tables")
    p.add_argument("--runs", type=int, default=None, help="override runs per cell (quick look)")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for path in sorted(CONFIGS.glob("table*.json")):
        raw = json.loads(path.read_text())
        c_specs = raw.pop("c_specs", None)
        if args.runs:
            raw["runs"] = args.runs
        raw["workers"] = args.workers
        table = run_benchmark(ExperimentConfig.from_dict(raw), c_specs)
        for r in table.rows:
            rows.append({"setting": path.stem, **r})
            print(f"{path.stem:<24} {r['method']:>4} c={r['c_spec']:<12} n={r['n']:<3} {r['accuracy']:5.1f}%")
    write_rows(out / "tables.csv", ["setting", "method", "c_spec", "n", "accuracy", "runs", "failures"], rows)


if __name__ == "__main__":
    main()
