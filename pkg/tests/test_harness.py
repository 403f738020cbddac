import numpy as np
import pytest
from hypothesis import given, strategies as st

from momentconf.detector import detect
from momentconf.errors import DegenerateColumn, EmptyInput, InsufficientData, ParseError
from momentconf.fileio import load_dataset, read_table, write_dataset
from momentconf.harness import (
    CSpec,
    ExperimentConfig,
    analyze_csv,
    exceedance_curve,
    parse_range,
    run_benchmark,
    run_distribution,
    run_generator,
    subsample_reports,
    threshold_sweep,
)
from momentconf.models import Dataset, SpectrumSpec, build_model, sample


# -- exceedance curves ------------------------------------------------------


def test_exceedance_examples():
    c = exceedance_curve([0.0, 1.0, 2.0], [-1.0, 1.0, 3.0])
    np.testing.assert_allclose(c.probabilities, [1.0, 2 / 3, 0.0])


def test_exceedance_empty():
    with pytest.raises(EmptyInput):
        exceedance_curve([])


def test_default_thresholds():
    c = exceedance_curve([0.3, 0.1, 0.7])
    assert c.thresholds.size == 200
    assert c.thresholds[0] == 0.0 and c.thresholds[-1] == pytest.approx(0.7)
    assert c.probabilities[0] == 1.0


@given(values=st.lists(st.floats(0, 100), min_size=1, max_size=50))
def test_exceedance_non_increasing(values):
    c = exceedance_curve(values)
    assert np.all(np.diff(c.probabilities) <= 0)
    assert np.all((c.probabilities >= 0) & (c.probabilities <= 1))
    assert exceedance_curve(values, [min(values)]).probabilities[0] == 1.0


# -- config parsing ---------------------------------------------------------


@pytest.mark.parametrize(
    "text,confounded", [("zero", False), ("normal", True), ("uniform:2,3", True), ("uniform:1,2", True)]
)
def test_cspec_parse(text, confounded):
    cs = CSpec.parse(text)
    assert cs.confounded is confounded
    c = cs.draw(np.random.default_rng(0))
    if text.startswith("uniform"):
        assert cs.lo <= c <= cs.hi
    if text == "zero":
        assert c == 0.0


@pytest.mark.parametrize("text", ["uniform:3,2", "gamma", "uniform"])
def test_cspec_rejects(text):
    with pytest.raises(ValueError):
        CSpec.parse(text)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(runs=0)
    with pytest.raises(ValueError):
        ExperimentConfig(L=1)
    with pytest.raises(ValueError):
        ExperimentConfig(method="other")
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"n": [10], "bogus": 1})
    cfg = ExperimentConfig(n=5, L=0)
    assert cfg.n == [5]
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_parse_range():
    np.testing.assert_allclose(parse_range("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1.0])
    assert parse_range("0:1:0.02").size == 51
    np.testing.assert_allclose(parse_range("0.1,0.5"), [0.1, 0.5])


def test_run_generator_independent_streams():
    a = run_generator(0, 0, 10, 0).standard_normal(3)
    b = run_generator(0, 0, 10, 1).standard_normal(3)
    c = run_generator(0, 0, 10, 0).standard_normal(3)
    assert not np.array_equal(a, b)
    np.testing.assert_array_equal(a, c)


# -- experiments ------------------------------------------------------------


def test_distribution_causal_population():
    cfg = ExperimentConfig(n=[10], L=0, runs=200, spectrum="random:0.5,1")
    (res,) = run_distribution(cfg, thresholds=[0.5])
    assert res.curve.probabilities[0] < 0.1
    assert res.failures == []


def test_distribution_confounded_population():
    cfg = ExperimentConfig(n=[10], L=0, runs=200, c_spec="uniform:2,3", spectrum="random:0.5,1")
    (res,) = run_distribution(cfg, thresholds=[0.5])
    assert res.curve.probabilities[0] > 0.7


def test_distribution_deterministic():
    cfg = ExperimentConfig(n=[6, 8], L=100, runs=20, c_spec="normal", seed=3)
    first = run_distribution(cfg)
    second = run_distribution(cfg)
    for r1, r2 in zip(first, second):
        np.testing.assert_array_equal(r1.values, r2.values)
        np.testing.assert_array_equal(r1.curve.probabilities, r2.curve.probabilities)


def test_parallel_matches_serial():
    serial = ExperimentConfig(n=[6], L=100, runs=12, c_spec="uniform:2,3", seed=5)
    parallel = ExperimentConfig(n=[6], L=100, runs=12, c_spec="uniform:2,3", seed=5, workers=2)
    np.testing.assert_array_equal(run_distribution(serial)[0].values, run_distribution(parallel)[0].values)


def test_benchmark_table_layout():
    cfg = ExperimentConfig(n=[5, 8], L=200, runs=10, method="both")
    table = run_benchmark(cfg, ["zero", "uniform:2,3"])
    assert len(table.rows) == 2 * 2 * 2
    for row in table.rows:
        assert 0 <= row["accuracy"] <= 100
        assert row["runs"] + row["failures"] == 10
    assert table.accuracy("ours", "uniform:2,3", 8) == next(
        r["accuracy"] for r in table.rows if r["method"] == "ours" and r["c_spec"] == "uniform:2,3" and r["n"] == 8
    )


def test_population_accuracy_bounds_sampled():
    pop, sampled = [], []
    for seed in range(5):
        kw = dict(n=[10], runs=40, c_spec="uniform:2,3", spectrum="random:0.5,1", seed=seed)
        pop.append(run_benchmark(ExperimentConfig(L=0, **kw)).accuracy("ours", "uniform:2,3", 10))
        sampled.append(run_benchmark(ExperimentConfig(L=500, **kw)).accuracy("ours", "uniform:2,3", 10))
    # sampling noise can only blur the decision, so up to a few runs of slack
    assert np.median(pop) >= np.median(sampled) - 5.0


def test_sweep_endpoints():
    cfg = ExperimentConfig(n=[8], L=200, runs=20, c_spec="uniform:2,3")
    (res,) = threshold_sweep(cfg, [0.0, 0.5, 1e9])
    assert res.tpr[0] == 1.0 and res.fpr[0] == 1.0
    assert res.tpr[-1] == 0.0 and res.fpr[-1] == 0.0
    assert np.all(np.diff(res.tpr) <= 0) and np.all(np.diff(res.fpr) <= 0)


def test_sweep_needs_confounded_class():
    with pytest.raises(ValueError):
        threshold_sweep(ExperimentConfig(c_spec="zero"), [0.5])


# -- CSV workflow -----------------------------------------------------------


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    data = sample(build_model(7, c=2.0, rng=rng), 300, rng)
    path = tmp_path / "d.csv"
    write_dataset(data, path)
    res = analyze_csv(path, "y", subsample_L=None, repeats=1, normalize=False)
    assert res.reports[0].d_hat == pytest.approx(detect(data).d_hat, abs=1e-10)
    assert len(res.reports) == 1 and res.reports[0].L == 300


def _planted_csv(path, rng, n=40, L=3000):
    model = build_model(n, c=3.0, spec=SpectrumSpec("constant"), rng=rng)
    z = rng.standard_normal(L)
    X = np.outer(z, model.b) + rng.standard_normal((L, n))
    y = X @ model.a + model.c * z + rng.standard_normal(L)
    cols = [f"x{j + 1}" for j in range(n)] + ["proxy"]
    write_dataset(Dataset(np.column_stack([X, z]), y, columns=cols, target="y"), path)


def test_dropping_planted_confounder_raises_deviation(tmp_path):
    path = tmp_path / "planted.csv"
    _planted_csv(path, np.random.default_rng(12))
    kept = analyze_csv(path, "y", subsample_L=500, repeats=30, seed=1)
    dropped = analyze_csv(path, "y", drop_columns=["proxy"], subsample_L=500, repeats=30, seed=1)
    assert np.median(dropped.d_values) > np.median(kept.d_values)
    assert dropped.reports[0].n == 40 and kept.reports[0].n == 41
    assert all(r.normalized for r in kept.reports)


def test_subsample_without_replacement_and_seeded(rng):
    data = Dataset(rng.standard_normal((100, 3)), rng.standard_normal(100))
    a = subsample_reports(data, 50, repeats=5, seed=2)
    b = subsample_reports(data, 50, repeats=5, seed=2)
    np.testing.assert_array_equal(a.d_values, b.d_values)
    assert len(set(a.d_values)) > 1
    with pytest.raises(InsufficientData):
        subsample_reports(data, 101)


def test_zero_variance_column(tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("a,flat,y\n1,5,2\n2,5,3\n4,5,1\n")
    with pytest.raises(DegenerateColumn) as exc:
        analyze_csv(path, "y", subsample_L=None, repeats=1)
    assert exc.value.column == "flat"
    assert "flat" in str(exc.value)


def test_js_fits_reported(tmp_path):
    rng = np.random.default_rng(1)
    write_dataset(sample(build_model(5, rng=rng), 200, rng), tmp_path / "d.csv")
    res = analyze_csv(tmp_path / "d.csv", "y", subsample_L=100, repeats=3, method="both")
    assert len(res.js_fits) == 3


# -- CSV parsing ------------------------------------------------------------


@pytest.mark.parametrize(
    "text,row,column",
    [
        ("a,b,y\n1,2,3\n4,oops,6\n", 3, "b"),
        ("a,b,y\n1,2,3\n4,5\n", 3, None),
        ("a,b,y\n1,nan,3\n", 2, "b"),
        ("a,a,y\n1,2,3\n", 1, None),
    ],
)
def test_parse_errors(tmp_path, text, row, column):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ParseError) as exc:
        read_table(path)
    assert exc.value.row == row
    assert exc.value.column == column


def test_parse_empty_and_missing_columns(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("")
    with pytest.raises(ParseError):
        read_table(path)
    path.write_text("a,y\n1,2\n3,4\n")
    with pytest.raises(ParseError):
        load_dataset(path, "target")
    with pytest.raises(ParseError):
        load_dataset(path, "y", drop=["zzz"])
    with pytest.raises(ParseError):
        load_dataset(path, "y", drop=["a"])


def test_parse_bom_and_blank_lines(tmp_path):
    path = tmp_path / "bom.csv"
    path.write_bytes("﻿a,y\n1.5,2\n\n3,4e-1\n".encode("utf-8"))
    header, table = read_table(path)
    assert header == ["a", "y"]
    np.testing.assert_array_equal(table, [[1.5, 2.0], [3.0, 0.4]])
