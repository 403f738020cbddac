import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from momentconf.cli import main
from momentconf.detector import detect
from momentconf.fileio import load_dataset, read_model

MANIFEST_KEYS = {"version", "command", "config", "seed", "started", "elapsed_ms", "failures"}


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_writes_outputs(tmp_path, capsys):
    out = tmp_path / "sim"
    code = main(["simulate", "--n", "5,8", "--samples", "0", "--runs", "15", "--c", "uniform:2,3", "--seed", "4", "--dump-dataset", "--out", str(out)])
    assert code == 0
    for n in (5, 8):
        assert len(_rows(out / f"values_n{n}.csv")) == 15
        curve = _rows(out / f"exceedance_n{n}.csv")
        probs = [float(r["probability"]) for r in curve]
        assert probs[0] == 1.0 and all(b <= a for a, b in zip(probs, probs[1:]))
        assert (out / f"model_n{n}.json").exists() and (out / f"data_n{n}.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest) == MANIFEST_KEYS
    assert manifest["command"] == "simulate" and manifest["seed"] == 4
    assert json.loads(capsys.readouterr().out)[0]["n"] == 5


def test_dumped_dataset_detects_like_memory(tmp_path, capsys):
    out = tmp_path / "sim"
    main(["simulate", "--n", "6", "--runs", "2", "--c", "normal", "--samples", "300", "--dump-dataset", "--out", str(out)])
    data = load_dataset(out / "data_n6.csv", "y")
    model = read_model(out / "model_n6.json")
    assert model.n == 6
    capsys.readouterr()
    code = main(["detect", "--input", str(out / "data_n6.csv"), "--target", "y", "--no-normalize", "--out", str(tmp_path / "det")])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["report"]["d_hat"] == pytest.approx(detect(data).d_hat, abs=1e-10)
    rows = _rows(tmp_path / "det" / "reports.csv")
    assert len(rows) == 1
    assert set(json.loads((tmp_path / "det" / "manifest.json").read_text())) == MANIFEST_KEYS


def test_detect_drop_and_repeats(tmp_path, capsys):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((120, 3))
    y = X @ [1.0, -1.0, 0.5] + rng.standard_normal(120)
    path = tmp_path / "d.csv"
    np.savetxt(path, np.column_stack([X, y]), delimiter=",", header="a,b,c,target", comments="")
    code = main(["detect", "--input", str(path), "--target", "target", "--drop", "c", "--subsample", "60", "--repeats", "7", "--method", "both", "--out", str(tmp_path / "o")])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["repeats"] == 7 and "js_fraction_confounder" in summary
    rows = _rows(tmp_path / "o" / "reports.csv")
    assert len(rows) == 7 and rows[0]["n"] == "2" and rows[0]["L"] == "60"


def test_detect_warns_without_normalization(tmp_path, caplog):
    path = tmp_path / "d.csv"
    path.write_text("a,y\n1,2\n2,1\n3,5\n4,4\n")
    with caplog.at_level("WARNING"):
        assert main(["detect", "--input", str(path), "--target", "y", "--no-normalize"]) == 0
    assert "not normalized" in caplog.text


def test_detect_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("a,y\n1,2\nx,3\n")
    assert main(["detect", "--input", str(path), "--target", "y"]) == 2
    err = capsys.readouterr().err
    assert "row 3" in err and "'a'" in err


def test_benchmark_and_sweep(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": [6], "L": 200, "runs": 10, "method": "both", "c_specs": ["zero", "uniform:2,3"]}))
    assert main(["benchmark", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    rows = _rows(tmp_path / "b" / "benchmark.csv")
    assert {(r["method"], r["c_spec"]) for r in rows} == {
        ("ours", "zero"), ("js", "zero"), ("ours", "uniform:2,3"), ("js", "uniform:2,3")
    }
    sweep_cfg = tmp_path / "sweep.json"
    sweep_cfg.write_text(json.dumps({"n": [6], "L": 200, "runs": 10, "c_spec": "uniform:2,3"}))
    assert main(["sweep", "--config", str(sweep_cfg), "--gammas", "0:1:0.1", "--out", str(tmp_path / "s")]) == 0
    rows = _rows(tmp_path / "s" / "sweep.csv")
    assert len(rows) == 11
    manifest = json.loads((tmp_path / "s" / "manifest.json").read_text())
    assert manifest["command"] == "sweep" and set(manifest) == MANIFEST_KEYS


def test_asymptotic_exp(capsys):
    assert main(["asymptotic", "--kind", "exp", "--c", "1", "--rb", "1", "--sigma1", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["deviation"] == pytest.approx((math.e - 2) / (math.e + 1))
    assert out["nonidentifiable_rb2"] == pytest.approx(math.e / 2)
    assert out["nonidentifiable_rb2_n2000"] == pytest.approx(math.e / 2, rel=0.01)


@pytest.mark.parametrize("kind,expected", [("constant", 0.25), ("poly", 4.0)])
def test_asymptotic_other_kinds(capsys, kind, expected):
    c = "2" if kind == "poly" else "1"
    assert main(["asymptotic", "--kind", kind, "--c", c, "--rb", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["deviation"] == pytest.approx(expected)


def test_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": [6], "unknown_key": 1}))
    assert main(["benchmark", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "momentconf", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
