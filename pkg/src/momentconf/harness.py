"""Experiment orchestration: exceedance curves, accuracy tables, threshold
sweeps and the repeated-subsample workflow for CSV data.

Every run draws from its own generator seeded by ``(seed, stream, n, run)``,
so results do not depend on worker count or scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Iterable, Sequence

import numpy as np

from . import baseline
from .detector import (
    DEFAULT_GAMMA,
    Decision,
    DeviationReport,
    decide,
    deviation_from_covariances,
    detect,
    empirical_covariances,
    normalize_unit_variance,
)
from .errors import EmptyInput, InsufficientData, MomentConfError
from .fileio import load_dataset
from .models import (
    CoeffFamily,
    Dataset,
    NoiseFamily,
    SpectrumSpec,
    build_model,
    population_quantities,
    sample,
)

METHODS = ("ours", "js", "both")

# stream ids keep the random draws of different experiment kinds apart
_STREAM_DISTRIBUTION = 0
_STREAM_BENCHMARK = 100
_STREAM_SWEEP_CAUSAL = 200
_STREAM_SWEEP_CONFOUNDED = 201


@dataclass(frozen=True)
class CSpec:
    """Distribution of the confounder weight ``c``."""

    kind: str = "zero"
    lo: float = 0.0
    hi: float = 0.0

    @classmethod
    def parse(cls, text: str) -> CSpec:
        kind, _, arg = text.strip().lower().partition(":")
        if kind == "zero":
            return cls("zero")
        if kind == "normal":
            return cls("normal")
        if kind == "uniform":
            lo, hi = (float(x) for x in arg.split(","))
            if not lo <= hi:
                raise ValueError("uniform c range needs lo <= hi")
            return cls("uniform", lo, hi)
        raise ValueError(f"unknown c spec {text!r}")

    def draw(self, rng: np.random.Generator) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "normal":
            return float(rng.standard_normal())
        return float(rng.uniform(self.lo, self.hi))

    @property
    def confounded(self) -> bool:
        return self.kind == "normal" or (self.kind == "uniform" and (self.lo != 0 or self.hi != 0))

    def label(self) -> str:
        if self.kind == "uniform":
            return f"uniform:{self.lo:g},{self.hi:g}"
        return self.kind


@dataclass
class ExperimentConfig:
    """Settings shared by all experiment kinds.

    ``L = 0`` uses the true model covariances instead of samples.
    """

    n: list[int] = field(default_factory=lambda: [10])
    L: int = 500
    runs: int = 200
    c_spec: str = "zero"
    coeff_family: str = "normal"
    noise_family: str = "gaussian"
    spectrum: str = "constant"
    sigma1: float = 1.0
    gamma: float = DEFAULT_GAMMA
    seed: int = 0
    method: str = "ours"
    r_a: float = 1.0
    r_b: float = 1.0
    f_std: float = 1.0
    metric: str = "euclidean"
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.n, int):
            self.n = [self.n]
        self.n = [int(x) for x in self.n]
        if not self.n or any(x < 1 for x in self.n):
            raise ValueError("dimensions must be positive")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.L != 0 and self.L < 2:
            raise ValueError("L must be 0 (population) or >= 2")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        CSpec.parse(self.c_spec)
        CoeffFamily(self.coeff_family)
        NoiseFamily(self.noise_family)
        self.spectrum_spec()

    def spectrum_spec(self) -> SpectrumSpec:
        return SpectrumSpec.parse(self.spectrum, self.sigma1)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class ExceedanceCurve:
    thresholds: np.ndarray
    probabilities: np.ndarray

    def rows(self) -> list[dict]:
        return [
            {"threshold": float(t), "probability": float(p)}
            for t, p in zip(self.thresholds, self.probabilities)
        ]


def exceedance_curve(values, thresholds=None, points: int = 200) -> ExceedanceCurve:
    """Fraction of ``values`` at or above each threshold.

    Default thresholds are ``points`` evenly spaced values from 0 to max(values).
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise EmptyInput("no values to summarize")
    if thresholds is None:
        thresholds = np.linspace(0.0, float(v.max()), points)
    t = np.sort(np.asarray(thresholds, dtype=float))
    counts = v.size - np.searchsorted(np.sort(v), t, side="left")
    return ExceedanceCurve(t, counts / v.size)


@dataclass(frozen=True)
class RunOutcome:
    n: int
    run: int
    c: float
    d: float = math.nan
    js_beta: float = math.nan
    js_decision: Decision | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def run_generator(seed: int, stream: int, n: int, run: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream, n, run)))


def _one_run(args: tuple) -> RunOutcome:
    config, n, c_text, stream, run, with_js = args
    rng = run_generator(config.seed, stream, n, run)
    c = CSpec.parse(c_text).draw(rng)
    try:
        model = build_model(
            n,
            r_a=config.r_a,
            r_b=config.r_b,
            c=c,
            spec=config.spectrum_spec(),
            noise_family=config.noise_family,
            rng=rng,
            coeff_family=config.coeff_family,
            f_std=config.f_std,
        )
        if config.L == 0:
            sigma_x, sigma_xy, _ = population_quantities(model)
        else:
            sigma_x, sigma_xy = empirical_covariances(sample(model, config.L, rng))
        d, a_hat, _ = deviation_from_covariances(sigma_x, sigma_xy)
        beta, js_dec = math.nan, None
        if with_js:
            w, lam = baseline.normalized_weights(a_hat, sigma_x)
            f = baseline.fit(w, lam, metric=config.metric)
            beta, js_dec = f.beta_star, f.decision
        if not math.isfinite(d):
            raise MomentConfError("deviation is not finite")
        return RunOutcome(n, run, c, d, beta, js_dec)
    except (MomentConfError, np.linalg.LinAlgError) as exc:
        return RunOutcome(n, run, c, error=f"{type(exc).__name__}: {exc}")


def _map(fn: Callable, tasks: Sequence, workers: int) -> list:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [fn(t) for t in tasks]


def _runs(config: ExperimentConfig, n: int, c_text: str, stream: int, count: int, with_js: bool) -> list[RunOutcome]:
    tasks = [(config, n, c_text, stream, r, with_js) for r in range(count)]
    return _map(_one_run, tasks, config.workers)


def _failures(outcomes: Iterable[RunOutcome]) -> list[dict]:
    return [{"n": o.n, "run": o.run, "c": o.c, "error": o.error} for o in outcomes if o.failed]


@dataclass
class DistributionResult:
    n: int
    values: np.ndarray
    curve: ExceedanceCurve
    failures: list[dict]


def run_distribution(config: ExperimentConfig, thresholds=None) -> list[DistributionResult]:
    """Deviation values over ``config.runs`` random models, one result per dimension."""
    out = []
    for n in config.n:
        outcomes = _runs(config, n, config.c_spec, _STREAM_DISTRIBUTION, config.runs, with_js=False)
        values = np.array([o.d for o in outcomes if not o.failed])
        if values.size == 0:
            raise EmptyInput(f"every run failed for n={n}")
        out.append(DistributionResult(n, values, exceedance_curve(values, thresholds), _failures(outcomes)))
    return out


@dataclass
class BenchmarkTable:
    rows: list[dict]
    failures: list[dict]

    def accuracy(self, method: str, c_spec: str, n: int) -> float:
        label = CSpec.parse(c_spec).label()
        for r in self.rows:
            if r["method"] == method and r["c_spec"] == label and r["n"] == n:
                return r["accuracy"]
        raise KeyError((method, c_spec, n))


def run_benchmark(config: ExperimentConfig, c_specs: Sequence[str] | None = None) -> BenchmarkTable:
    """Detection accuracy (percent) per method, confounder setting and dimension.

    A run counts as correct when the decision matches whether the drawn model
    has a confounder. Both methods see the same data in each run.
    """
    c_specs = [config.c_spec] if c_specs is None else list(c_specs)
    methods = ["ours", "js"] if config.method == "both" else [config.method]
    rows, failures = [], []
    for k, c_text in enumerate(c_specs):
        cs = CSpec.parse(c_text)
        for n in config.n:
            outcomes = _runs(config, n, c_text, _STREAM_BENCHMARK + k, config.runs, with_js="js" in methods)
            ok = [o for o in outcomes if not o.failed]
            failures.extend(_failures(outcomes))
            for method in methods:
                correct = 0
                for o in ok:
                    truth = o.c != 0
                    if method == "ours":
                        flagged = decide(o.d, config.gamma) is Decision.CONFOUNDER
                    else:
                        flagged = o.js_decision is Decision.CONFOUNDER
                    correct += flagged == truth
                acc = 100.0 * correct / len(ok) if ok else math.nan
                rows.append(
                    {
                        "method": method,
                        "c_spec": cs.label(),
                        "n": n,
                        "accuracy": acc,
                        "runs": len(ok),
                        "failures": len(outcomes) - len(ok),
                    }
                )
    return BenchmarkTable(rows, failures)


@dataclass
class SweepResult:
    n: int
    gammas: np.ndarray
    tpr: np.ndarray
    fpr: np.ndarray
    failures: list[dict]

    @property
    def best_gamma(self) -> float:
        """Threshold with the largest TPR - FPR gap (smallest one on ties)."""
        return float(self.gammas[int(np.argmax(self.tpr - self.fpr))])

    def rows(self) -> list[dict]:
        return [
            {"n": self.n, "gamma": float(g), "tpr": float(t), "fpr": float(f)}
            for g, t, f in zip(self.gammas, self.tpr, self.fpr)
        ]


def parse_range(text: str) -> np.ndarray:
    """``start:stop:step`` (inclusive of stop) or a comma list."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ValueError("step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(count)
    return np.array([float(x) for x in text.split(",")])


def threshold_sweep(config: ExperimentConfig, gammas, runs_per_class: int | None = None) -> list[SweepResult]:
    """TPR over confounded models (``config.c_spec``) and FPR over causal ones.

    Each class uses ``runs_per_class`` draws (default ``config.runs``);
    deviations are computed once and thresholded at every gamma.
    """
    if not CSpec.parse(config.c_spec).confounded:
        raise ValueError("sweep needs a confounded c_spec for the positive class")
    g = np.sort(np.asarray(gammas, dtype=float))
    count = config.runs if runs_per_class is None else runs_per_class
    out = []
    for n in config.n:
        pos = _runs(config, n, config.c_spec, _STREAM_SWEEP_CONFOUNDED, count, with_js=False)
        neg = _runs(config, n, "zero", _STREAM_SWEEP_CAUSAL, count, with_js=False)
        dp = np.array([o.d for o in pos if not o.failed])
        dn = np.array([o.d for o in neg if not o.failed])
        if dp.size == 0 or dn.size == 0:
            raise EmptyInput(f"every run failed for n={n}")
        tpr = (dp[None, :] > g[:, None]).mean(axis=1)
        fpr = (dn[None, :] > g[:, None]).mean(axis=1)
        out.append(SweepResult(n, g, tpr, fpr, _failures(pos) + _failures(neg)))
    return out


@dataclass
class CsvAnalysis:
    reports: list[DeviationReport]
    curve: ExceedanceCurve
    js_fits: list[baseline.PatternFit] = field(default_factory=list)

    @property
    def d_values(self) -> np.ndarray:
        return np.array([r.d_hat for r in self.reports])


def subsample_reports(
    data: Dataset,
    subsample_L: int | None = None,
    repeats: int = 1,
    gamma: float = DEFAULT_GAMMA,
    seed: int = 0,
    method: str = "ours",
    metric: str = "euclidean",
    thresholds=None,
) -> CsvAnalysis:
    """Repeated detection on row subsamples drawn without replacement.

    ``subsample_L=None`` (or equal to the row count) uses every row in order.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if subsample_L is not None and subsample_L > data.L:
        raise InsufficientData(f"subsample of {subsample_L} requested from {data.L} rows")
    full = subsample_L is None or subsample_L == data.L
    reports, fits = [], []
    for k in range(repeats):
        if full:
            part = data
        else:
            rng = run_generator(seed, 0, data.n, k)
            idx = rng.choice(data.L, size=subsample_L, replace=False)
            part = Dataset(data.X[idx], data.y[idx], data.normalized, data.columns, data.target)
        reports.append(detect(part, gamma))
        if method in ("js", "both"):
            fits.append(baseline.js_detect(part, metric=metric))
    curve = exceedance_curve([r.d_hat for r in reports], thresholds)
    return CsvAnalysis(reports, curve, fits)


def analyze_csv(
    path,
    target_column: str,
    drop_columns: Sequence[str] = (),
    subsample_L: int | None = 500,
    repeats: int = 200,
    gamma: float = DEFAULT_GAMMA,
    seed: int = 0,
    normalize: bool = True,
    method: str = "ours",
    metric: str = "euclidean",
) -> CsvAnalysis:
    """Load a CSV, optionally drop features, normalize, and run repeated detection.

    Raises:
        ParseError: missing or non-numeric columns.
        DegenerateColumn: a constant column when normalizing.
        InsufficientData: more rows requested than available.
    """
    data = load_dataset(path, target_column, drop_columns)
    if normalize:
        data = normalize_unit_variance(data)
    return subsample_reports(data, subsample_L, repeats, gamma, seed, method, metric)
