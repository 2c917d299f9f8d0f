import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ewps import EwpsModel, Geometric, Weibull
from ewps.cli import MODEL_ALIASES, main
from ewps.data import PHOSPHORUS, describe, phosphorus, read_dataset, write_dataset

PHOSPHORUS_SUMMARY = {"min": 0.0500, "q1": 0.1000, "median": 0.1300, "mean": 0.1408,
                      "q3": 0.1800, "max": 0.2800, "variance": 0.0030}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ----------------------------------------------------------------------
# dataset
# ----------------------------------------------------------------------
def test_embedded_dataset():
    data = phosphorus()
    assert len(PHOSPHORUS) == 128
    assert data.source == "embedded_phosphorus"
    assert np.all(data.values > 0)


def test_describe_reproduces_reference_summary():
    s = describe(phosphorus())
    for key, value in PHOSPHORUS_SUMMARY.items():
        assert round(getattr(s, key), 4) == value, key
    assert not s.variance_undefined


def test_describe_single_point():
    s = describe([0.37])
    assert s.min == s.q1 == s.median == s.mean == s.q3 == s.max == 0.37
    assert s.variance is None and s.variance_undefined


def test_file_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.lognormal(size=50) * 10.0 ** rng.integers(-8, 8, 50)
    path = tmp_path / "d.txt"
    write_dataset(x, path)
    back = read_dataset(path)
    assert back.source == "file"
    assert np.array_equal(back.values, x)


def test_read_comments_and_header(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("# leaves\nconcentration\n0.5  # first\n\n1.25\n3e-2\n")
    assert read_dataset(path).values.tolist() == [0.5, 1.25, 0.03]
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,4\n")
    with pytest.raises(ValueError):
        read_dataset(bad)


# ----------------------------------------------------------------------
# describe / simulate / eval
# ----------------------------------------------------------------------
def test_cli_describe(capsys):
    code, out, _ = run(capsys, "describe", "--embedded")
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 128
    for key, value in PHOSPHORUS_SUMMARY.items():
        assert round(doc[key], 4) == value


def test_cli_simulate_deterministic(tmp_path, capsys):
    args = ["simulate", "--model", "eg", "--theta", "0.5", "--alpha", "1", "--n", "5", "--seed", "3"]
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 5


def test_cli_simulate_mean(capsys):
    code, out, _ = run(capsys, "simulate", "--model", "eg", "--theta", "0.5", "--alpha", "1",
                       "--n", "10000", "--seed", "1")
    assert code == 0
    x = np.array([float(v) for v in out.split()])
    assert x.size == 10_000
    assert abs(x.mean() - math.log(2)) < 3 * x.std(ddof=1) / math.sqrt(x.size)


def test_cli_simulate_usage_errors(capsys):
    assert run(capsys, "simulate", "--model", "eg", "--theta", "0.5", "--n", "0")[0] == 1
    assert run(capsys, "simulate", "--model", "eg", "--theta", "1.5", "--n", "3")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--model", "nope", "--theta", "0.5", "--n", "3"])
    assert exc.value.code == 1
    capsys.readouterr()


def parse_table(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_cli_eval_support_and_round_trip(capsys):
    model = ["--mixer", "poisson", "--generator", "pareto", "--param", "k=0.2", "--theta", "1.5",
             "--alpha", "2"]
    code, out, _ = run(capsys, "eval", *model, "--x", "0.2,0.5", "--functions", "cdf")
    assert code == 0
    rows = parse_table(out)
    assert float(rows[0]["cdf"]) == 0.0
    code, out, _ = run(capsys, "eval", "--model", "wg", "--theta", "0.4", "--alpha", "1.5",
                       "--param", "gamma=2", "--u", "0.5")
    q = float(parse_table(out)[0]["quantile"])
    code, out, _ = run(capsys, "eval", "--model", "wg", "--theta", "0.4", "--alpha", "1.5",
                       "--param", "gamma=2", "--x", repr(q), "--functions", "cdf")
    assert float(parse_table(out)[0]["cdf"]) == pytest.approx(0.5, abs=1e-9)


def test_cli_eval_mwg_hazard(capsys):
    code, out, _ = run(capsys, "eval", "--model", "mwg", "--theta", "0.5", "--alpha", "2",
                       "--param", "gamma=1.5", "--param", "lambda=0.5", "--x", "0.01:3:300",
                       "--functions", "hazard")
    assert code == 0
    h = np.array([float(r["hazard"]) for r in parse_table(out)])
    assert h.size == 300 and np.all(np.isfinite(h)) and np.all(h > 0)


def test_cli_eval_scalars(capsys):
    code, out, _ = run(capsys, "eval", "--model", "eg", "--theta", "0.5", "--alpha", "1",
                       "--moment", "1", "--entropy")
    assert code == 0
    lines = dict(line.split(",") for line in out.split())
    assert float(lines["moment_1"]) == pytest.approx(math.log(2), rel=1e-9)
    assert math.isfinite(float(lines["entropy"]))
    assert run(capsys, "eval", "--model", "eg", "--theta", "0.5")[0] == 1


# ----------------------------------------------------------------------
# fit
# ----------------------------------------------------------------------
def test_cli_fit_report_and_plot(tmp_path, capsys):
    report, plot = tmp_path / "r.json", tmp_path / "p.csv"
    code, _, _ = run(capsys, "fit", "--model", "gp", "--embedded", "--multistart", "2",
                     "--report", str(report), "--plot", str(plot))
    assert code == 0
    doc = json.loads(report.read_text())
    assert doc["converged"] is True
    assert doc["data"]["source"] == "embedded_phosphorus"
    assert set(doc["estimates"]) == {"theta", "alpha", "beta"}
    assert -2 * doc["loglik"] == pytest.approx(-374.7, abs=1.0)
    for key in ("std_errors", "criteria", "ks", "boundary_flags", "iterations", "trace_summary"):
        assert key in doc
    lines = plot.read_text().splitlines()
    assert lines[0] == "x,pdf,cdf,ecdf"
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert rows.shape == (400, 4)
    assert rows[0, 0] == 0.05 and rows[-1, 0] == 0.28
    assert rows[-1, 3] == 1.0 and np.all(np.diff(rows[:, 2]) >= 0)


def test_cli_fit_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        run(capsys, "fit", "--model", "cp", "--embedded", "--multistart", "1", "--seed", "4",
            "--report", str(p))
    a, b = (json.loads(p.read_text()) for p in paths)
    assert a == b


def test_cli_fit_insufficient_data(tmp_path, capsys):
    data, report = tmp_path / "one.txt", tmp_path / "r.json"
    data.write_text("0.4\n")
    code, _, err = run(capsys, "fit", "--model", "wg", "--data", str(data), "--report", str(report))
    assert code == 2
    assert "insufficient" in err.lower()
    assert json.loads(report.read_text())["converged"] is False


def test_cli_fit_usage_errors(tmp_path, capsys):
    assert run(capsys, "fit", "--model", "wg", "--data", str(tmp_path / "missing.txt"))[0] == 1
    bad = tmp_path / "neg.txt"
    bad.write_text("0.1\n-0.2\n0.3\n0.5\n0.6\n")
    assert run(capsys, "fit", "--model", "eg", "--data", str(bad))[0] == 1


def test_cli_subprocess_exit_code(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ewps", "describe", "--embedded"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["n"] == 128
    proc = subprocess.run([sys.executable, "-m", "ewps", "simulate", "--model", "eg", "--theta", "0.5",
                           "--n", "0"], capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stderr


# ----------------------------------------------------------------------
# compare
# ----------------------------------------------------------------------
def test_cli_compare_self_identical(capsys):
    code, out, _ = run(capsys, "compare", "--models", "eg,eg", "--embedded", "--multistart", "1")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0].startswith("model,neg2loglik,AIC,BIC,AICC,CAIC,KS,converged")
    assert rows[1] == rows[2]


def test_cli_compare_recovers_weibull(tmp_path, capsys):
    truth = EwpsModel(Geometric(), Weibull(3.0), 0.5, 1.0)
    path = tmp_path / "wg.txt"
    write_dataset(truth.sample(2000, seed=13), path)
    code, out, _ = run(capsys, "compare", "--models", "eg", "--models", "wg", "--data", str(path),
                       "--multistart", "1")
    assert code == 0
    assert parse_table(out)[0]["model"] == "wg"


def test_cli_compare_rejects_unknown(capsys):
    assert run(capsys, "compare", "--models", "eg,zz", "--embedded")[0] == 1
    assert run(capsys, "compare", "--models", "eg", "--embedded")[0] == 1


@pytest.mark.slow
def test_cli_compare_six_models_ranks_cl_first(tmp_path, capsys):
    out_path = tmp_path / "cmp.csv"
    code, out, _ = run(capsys, "compare", "--models", "mwg,wg,gp,pp,cp,cl", "--embedded",
                       "--jobs", "3", "--out", str(out_path))
    assert code == 0
    rows = parse_table(out)
    assert [r["model"] for r in rows][0] == "cl"
    assert sorted(r["model"] for r in rows) == sorted(["mwg", "wg", "gp", "pp", "cp", "cl"])
    assert out_path.read_text() == out
    aics = [float(r["AIC"]) for r in rows]
    assert aics == sorted(aics)


def test_model_aliases_cover_examples():
    assert {"mwg", "wg", "gp", "pp", "cp", "cl", "eg"} <= set(MODEL_ALIASES)
