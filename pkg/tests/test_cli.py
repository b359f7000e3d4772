import csv
import json

import pytest

from ramanent.cli import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main


def run(argv, tmp_path, name="out.csv"):
    path = tmp_path / name
    code = main(argv + ["--out", str(path)])
    return code, path.read_text() if path.exists() else ""


def data_rows(text):
    return list(csv.reader(line for line in text.splitlines() if line and not line.startswith("#")))[1:]


def summary(text):
    out = {}
    for line in text.splitlines():
        if line.startswith("# summary."):
            key, _, val = line[len("# summary."):].partition(": ")
            out[key] = val
    return out


def test_table1_capped(tmp_path):
    code, text = run(["table1", "--n-cap", "10"], tmp_path)
    assert code == EXIT_OK
    assert text.startswith("# tool: ramanent")
    rows = data_rows(text)
    assert rows[0][:2] == ["f_{1,2}", "capped"]
    assert len(rows) == 8


def test_region_single_cell(tmp_path):
    code, text = run(["region", "--spec", "1,2", "--grid", "1x1"], tmp_path)
    assert code == EXIT_OK
    assert data_rows(text) == [["0", "0", "0", ""]]


def test_region_weights(tmp_path):
    code, text = run(["region", "--spec", "1,2", "--grid", "20x20", "--alpha", "0.8"], tmp_path)
    assert code == EXIT_OK
    s = summary(text)
    assert 0 < float(s["weight_sum"]) <= 1
    assert s["max_n"] == "13"


@pytest.mark.slow
def test_region_diagonal_count(tmp_path):
    code, text = run(["region", "--spec", "1,2,3", "--grid", "130x130", "--workers", "4"], tmp_path)
    assert code == EXIT_OK
    assert summary(text)["detected_diagonal"] == "114"


@pytest.mark.parametrize("preset", ["ideal", "loss50", "eff90", "gauss2"])
def test_distribution_presets(tmp_path, preset):
    code, text = run(["distribution", "--n", "10", "--m", "10", "--preset", preset], tmp_path)
    assert code == EXIT_OK
    s = summary(text)
    assert float(s["sum"]) == pytest.approx(1.0, abs=1e-9)
    rows = data_rows(text)
    if preset == "ideal":
        assert all(float(p) == 0 for r, p in rows if int(r) % 2)
    if preset == "loss50":
        assert float(s["mean"]) == pytest.approx(5.0, abs=1e-10)


def test_deterministic_bytes(tmp_path):
    argv = ["quadrature", "richter-demo", "--state", "super01", "--count", "20000", "--seed", "5"]
    _, a = run(argv, tmp_path, "a.csv")
    _, b = run(argv, tmp_path, "b.csv")
    assert a == b and a


def test_json_mirrors_csv(tmp_path):
    code, text = run(["quadrature", "duan-gaussian", "--alpha", "1", "--eta", "0.51", "--format", "json"],
                     tmp_path, "o.json")
    assert code == EXIT_OK
    doc = json.loads(text)
    assert doc["columns"] == ["var_q_sum", "var_p_diff", "total", "detected"]
    assert doc["summary"]["lossy_detected"] is True


def test_sweep_sigma_small(tmp_path):
    code, text = run(["sweep", "sigma", "--spec", "1,2", "--values", "0.5:1.5:0.5", "--no-closure"], tmp_path)
    assert code == EXIT_OK
    assert [r[0] for r in data_rows(text)] == ["0.5", "1.0", "1.5"]


def test_sweep_efficiency_fixture_mismatch_exit(tmp_path):
    # n_cap below the tabulated value: the eta = 1 endpoint cannot match
    code, _ = run(["sweep", "efficiency", "--spec", "1,2", "--values", "1", "--n-cap", "5"], tmp_path)
    assert code == EXIT_MISMATCH


@pytest.mark.parametrize("argv", [
    ["region", "--spec", "0,1"],
    ["region", "--grid", "ax3"],
    ["region", "--model", "eff:2,1"],
    ["distribution", "--n", "-1"],
    ["sweep", "efficiency", "--values", "0,1"],
    ["quadrature", "duan-gaussian"],
    ["table1", "--tail-eps", "0"],
])
def test_usage_errors(tmp_path, argv):
    code, _ = run(argv, tmp_path)
    assert code == EXIT_USAGE


def test_argparse_errors_exit_one():
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == EXIT_USAGE


def test_unwritable_output():
    assert main(["quadrature", "duan-number", "--out", "/nonexistent/dir/x.csv"]) == EXIT_USAGE
