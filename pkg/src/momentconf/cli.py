"""Command-line entry point: ``momentconf <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .deviation import closed_form, finite_n_nonidentifiable_radius_sq
from .errors import MomentConfError
from .fileio import write_dataset, write_json, write_model, write_rows
from .harness import (
    CSpec,
    ExperimentConfig,
    analyze_csv,
    parse_range,
    run_benchmark,
    run_distribution,
    threshold_sweep,
    run_generator,
)
from .models import build_model, sample

log = logging.getLogger("momentconf")

_KINDS = {"constant": "constant", "poly": "polynomial", "exp": "exponential"}


def _manifest(command: str, config: dict, seed, started: datetime, t0: float, failures: list) -> dict:
    return {
        "version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "started": started.isoformat(),
        "elapsed_ms": int(round((time.perf_counter() - t0) * 1000)),
        "failures": failures,
    }


def _split_list(values) -> list[str]:
    out = []
    for v in values or []:
        out.extend(x.strip() for x in v.split(",") if x.strip())
    return out


def cmd_detect(args, started, t0) -> int:
    if args.no_normalize:
        log.warning("data is not normalized to unit variance; gamma=%g has no calibrated meaning", args.gamma)
    drop = _split_list(args.drop)
    result = analyze_csv(
        args.input,
        args.target,
        drop_columns=drop,
        subsample_L=args.subsample,
        repeats=args.repeats,
        gamma=args.gamma,
        seed=args.seed,
        normalize=not args.no_normalize,
        method=args.method,
        metric=args.metric,
    )
    d = result.d_values
    summary = {
        "repeats": len(d),
        "median_d_hat": float(np.median(d)),
        "fraction_confounder": float(np.mean(d > args.gamma)),
    }
    if len(result.reports) == 1:
        summary["report"] = result.reports[0].to_dict()
    if result.js_fits:
        summary["js_fraction_confounder"] = float(np.mean([f.decision.value == "confounder" for f in result.js_fits]))
        if len(result.js_fits) == 1:
            summary["js_fit"] = result.js_fits[0].to_dict()
    print(json.dumps(summary, indent=2))

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        rows = []
        for k, r in enumerate(result.reports):
            row = {"repeat": k, **r.to_dict()}
            if result.js_fits:
                f = result.js_fits[k]
                row.update({"js_beta_star": f.beta_star, "js_nu_star": f.nu_star, "js_decision": f.decision.value})
            rows.append(row)
        write_rows(out / "reports.csv", list(rows[0].keys()), rows)
        write_rows(out / "exceedance.csv", ["threshold", "probability"], result.curve.rows())
        config = {
            "input": str(args.input),
            "target": args.target,
            "drop": drop,
            "gamma": args.gamma,
            "subsample": args.subsample,
            "repeats": args.repeats,
            "normalize": not args.no_normalize,
            "method": args.method,
            "metric": args.metric,
        }
        write_json(out / "manifest.json", _manifest("detect", config, args.seed, started, t0, []))
    return 0


def _config_from_simulate(args) -> ExperimentConfig:
    return ExperimentConfig(
        n=[int(x) for x in _split_list(args.n)],
        L=args.samples,
        runs=args.runs,
        c_spec=args.c,
        coeff_family=args.coeffs,
        noise_family=args.noise,
        spectrum=args.spectrum,
        sigma1=args.sigma1,
        gamma=args.gamma,
        seed=args.seed,
        r_a=args.ra,
        r_b=args.rb,
        workers=args.workers,
    )


def cmd_simulate(args, started, t0) -> int:
    config = _config_from_simulate(args)
    results = run_distribution(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failures = []
    summary = []
    for res in results:
        write_rows(out / f"values_n{res.n}.csv", ["run", "d"], [{"run": i, "d": float(v)} for i, v in enumerate(res.values)])
        write_rows(out / f"exceedance_n{res.n}.csv", ["threshold", "probability"], res.curve.rows())
        failures.extend(res.failures)
        summary.append(
            {
                "n": res.n,
                "runs": int(res.values.size),
                "median_d": float(np.median(res.values)),
                "fraction_above_gamma": float(np.mean(res.values > config.gamma)),
            }
        )
        if args.dump_dataset:
            # one extra model from a dedicated stream, with one sample of it
            rng = run_generator(config.seed, 999, res.n, 0)
            c = CSpec.parse(config.c_spec).draw(rng)
            model = build_model(
                res.n, config.r_a, config.r_b, c, config.spectrum_spec(), config.noise_family, rng,
                config.coeff_family, config.f_std,
            )
            write_model(model, out / f"model_n{res.n}.json")
            write_dataset(sample(model, config.L or 500, rng), out / f"data_n{res.n}.csv")
    write_json(out / "summary.json", summary)
    write_json(out / "manifest.json", _manifest("simulate", config.to_dict(), config.seed, started, t0, failures))
    print(json.dumps(summary, indent=2))
    return 0


def _load_config(path) -> tuple[ExperimentConfig, dict]:
    raw = json.loads(Path(path).read_text())
    extra = {k: raw.pop(k) for k in ("c_specs", "runs_per_class", "gammas") if k in raw}
    return ExperimentConfig.from_dict(raw), extra


def cmd_benchmark(args, started, t0) -> int:
    config, extra = _load_config(args.config)
    table = run_benchmark(config, extra.get("c_specs"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_rows(out / "benchmark.csv", ["method", "c_spec", "n", "accuracy", "runs", "failures"], table.rows)
    cfg = {**config.to_dict(), **extra}
    write_json(out / "manifest.json", _manifest("benchmark", cfg, config.seed, started, t0, table.failures))
    for r in table.rows:
        print(f"{r['method']:>5}  c={r['c_spec']:<14} n={r['n']:<4} accuracy={r['accuracy']:.1f}%")
    return 0


def cmd_sweep(args, started, t0) -> int:
    config, extra = _load_config(args.config)
    gammas = parse_range(args.gammas) if args.gammas else parse_range(extra.get("gammas", "0:1:0.02"))
    results = threshold_sweep(config, gammas, extra.get("runs_per_class"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, failures = [], []
    for res in results:
        rows.extend(res.rows())
        failures.extend(res.failures)
        print(f"n={res.n}: largest TPR-FPR gap at gamma={res.best_gamma:g}")
    write_rows(out / "sweep.csv", ["n", "gamma", "tpr", "fpr"], rows)
    cfg = {**config.to_dict(), **extra, "gammas": gammas.tolist()}
    write_json(out / "manifest.json", _manifest("sweep", cfg, config.seed, started, t0, failures))
    return 0


def cmd_asymptotic(args, started, t0) -> int:
    kind = _KINDS[args.kind]
    value = closed_form(kind, args.c, args.rb, args.sigma1)
    result = {"kind": kind, "c": args.c, "r_b": args.rb, "sigma1": args.sigma1, "deviation": value}
    if kind == "exponential":
        result["nonidentifiable_rb2"] = math.e * args.sigma1 / 2.0
        log_spectrum = math.log(args.sigma1) - np.arange(args.check_n, dtype=float)
        result[f"nonidentifiable_rb2_n{args.check_n}"] = finite_n_nonidentifiable_radius_sq(log_spectrum, log_scale=True)
    elif kind == "constant":
        result["nonidentifiable_rb2"] = None
    print(json.dumps(result, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="momentconf", description="Confounder detection from first moments of spectral measures.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="run the detector on a CSV file")
    d.add_argument("--input", required=True)
    d.add_argument("--target", required=True)
    d.add_argument("--drop", action="append", help="comma-separated feature columns to drop")
    d.add_argument("--gamma", type=float, default=0.5)
    d.add_argument("--subsample", type=int, default=None, help="rows per repeat (default: all rows)")
    d.add_argument("--repeats", type=int, default=1)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--no-normalize", action="store_true")
    d.add_argument("--method", choices=["ours", "js", "both"], default="ours")
    d.add_argument("--metric", choices=["euclidean", "kernel"], default="euclidean")
    d.add_argument("--out")
    d.set_defaults(func=cmd_detect)

    s = sub.add_parser("simulate", help="distribution of the deviation over random models")
    s.add_argument("--n", action="append", required=True, help="dimension(s), comma-separated")
    s.add_argument("--samples", type=int, default=0, help="sample size L; 0 uses true covariances")
    s.add_argument("--runs", type=int, default=200)
    s.add_argument("--c", default="zero", help="zero|normal|uniform:lo,hi")
    s.add_argument("--coeffs", choices=["normal", "uniform"], default="normal")
    s.add_argument("--noise", choices=["gaussian", "student", "lognormal", "mixture"], default="gaussian")
    s.add_argument("--spectrum", default="random:0.5,1", help="constant|poly|exp:rate|random:lo,hi")
    s.add_argument("--sigma1", type=float, default=1.0)
    s.add_argument("--ra", type=float, default=1.0)
    s.add_argument("--rb", type=float, default=1.0)
    s.add_argument("--gamma", type=float, default=0.5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--dump-dataset", action="store_true", help="also write one model JSON and sample CSV per n")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("benchmark", help="accuracy table from a JSON config")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_benchmark)

    w = sub.add_parser("sweep", help="TPR/FPR versus threshold from a JSON config")
    w.add_argument("--config", required=True)
    w.add_argument("--gammas", default=None, help="start:stop:step or comma list")
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_sweep)

    a = sub.add_parser("asymptotic", help="closed-form limiting deviation")
    a.add_argument("--kind", choices=sorted(_KINDS), required=True)
    a.add_argument("--c", type=float, required=True)
    a.add_argument("--rb", type=float, required=True)
    a.add_argument("--sigma1", type=float, default=1.0)
    a.add_argument("--check-n", type=int, default=2000, help="dimension for the finite-n radius check")
    a.set_defaults(func=cmd_asymptotic)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    try:
        return args.func(args, started, t0)
    except (MomentConfError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
