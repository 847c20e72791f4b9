import csv
import json
import math

import pytest

from gpeps.cli import main


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_path8(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["simulate", "--size", "fixture:path8", "--theta", "0.7", "--steps", "1",
                 "--chi", "4", "--obs", "avg_z", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 1
    assert float(rows[0]["value"]) == pytest.approx(math.cos(0.7), abs=1e-12)
    assert rows[0]["size"] == "fixture:path8"


def test_simulate_infinite_and_json(tmp_path):
    out, js = tmp_path / "r.csv", tmp_path / "r.json"
    assert main(["simulate", "--size", "infinite", "--theta", "0.4", "--steps", "2", "--chi", "4",
                 "--obs", "z@2", "--out", str(out), "--json", str(js)]) == 0
    rows = _rows(out)
    data = json.loads(js.read_text())
    assert len(data) == len(rows) == 1
    assert data[0]["value"] == float(rows[0]["value"])


@pytest.mark.parametrize("argv", [
    ["simulate", "--size", "fixture:path8", "--theta", "3.5", "--steps", "1", "--chi", "4", "--obs", "avg_z"],
    ["simulate", "--size", "fixture:path8", "--theta", "0.2", "--steps", "1", "--chi", "0", "--obs", "avg_z"],
    ["simulate", "--size", "fixture:path8", "--theta", "0.2", "--steps", "1", "--chi", "4", "--obs", "z@40"],
    ["simulate", "--size", "infinite", "--theta", "0.2", "--steps", "1", "--chi", "4", "--obs", "w10"],
    ["simulate", "--size", "mars", "--theta", "0.2", "--steps", "1", "--chi", "4", "--obs", "avg_z"],
    ["simulate", "--size", "fixture:path8", "--theta", "0.2", "--steps", "-1", "--chi", "4", "--obs", "avg_z"],
    ["nonsense"],
])
def test_usage_errors_exit_2_without_output(tmp_path, argv):
    out = tmp_path / "never.csv"
    assert main(argv + ["--out", str(out)] if argv != ["nonsense"] else argv) == 2
    assert not out.exists()


def test_lattice_export(tmp_path, capsys):
    out = tmp_path / "eagle.txt"
    assert main(["lattice", "--size", "eagle127", "--out", str(out), "--stats"]) == 0
    lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
    assert lines[0].split() == ["m", "127"]
    assert len(lines) == 145
    assert "girth=12" in capsys.readouterr().err


def test_oracle_subcommand(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle", "--size", "fixture:path8", "--theta", "0.7", "--steps", "1",
                 "--obs", "avg_z", "pauli:Z1,Z2", "--out", str(out)]) == 0
    vals = {r["observable"]: float(r["value"]) for r in _rows(out)}
    assert vals["avg_z"] == pytest.approx(math.cos(0.7), abs=1e-12)


def _sweep(tmp_path, name, chis="4,8"):
    out = tmp_path / name
    assert main(["simulate", "--size", "fixture:tree10", "--theta", "grid:5", "--steps", "2",
                 "--chi", chis, "--obs", "avg_z", "--out", str(out)]) == 0
    return out


def test_compare_identical_files(tmp_path, capsys):
    a = _sweep(tmp_path, "a.csv", "8")
    assert main(["compare", str(a), str(a), "--observable", "avg_z"]) == 0
    captured = capsys.readouterr()
    assert "max_abs_error=0.000000e+00" in captured.err
    assert len(captured.out.strip().splitlines()) == 6


def test_compare_against_oracle(tmp_path, capsys):
    a = _sweep(tmp_path, "a.csv", "8")
    ref = tmp_path / "ref.csv"
    assert main(["oracle", "--size", "fixture:tree10", "--theta", "grid:5", "--steps", "2",
                 "--obs", "avg_z", "--out", str(ref)]) == 0
    out = tmp_path / "cmp.csv"
    assert main(["compare", str(a), str(ref), "--observable", "avg_z", "--out", str(out)]) == 0
    errs = [float(r["abs_error"]) for r in _rows(out)]
    assert max(errs) < 1e-9


def test_extrapolate(tmp_path, capsys):
    src = tmp_path / "in.csv"
    out = _sweep(tmp_path, "s.csv", "2,4,8")
    src.write_text(out.read_text())
    svg = tmp_path / "fit.svg"
    assert main(["extrapolate", str(src), "--k", "3", "--svg", str(svg)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("observable,steps,theta_h,intercept")
    assert len(lines) == 6
    assert svg.read_text().startswith("<svg")
    assert main(["extrapolate", str(src), "--k", "7"]) == 2


def test_plot_two_points_deterministic(tmp_path):
    src = tmp_path / "two.csv"
    assert main(["simulate", "--size", "fixture:path8", "--theta", "0.1,0.9", "--steps", "1",
                 "--chi", "4", "--obs", "avg_z", "--out", str(src)]) == 0
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["plot", str(src), "--out", str(a)]) == 0
    assert main(["plot", str(src), "--out", str(b)]) == 0
    text = a.read_text()
    assert text.count("<polyline") == 1
    assert a.read_bytes() == b.read_bytes()


def test_plot_bad_spec(tmp_path):
    src = _sweep(tmp_path, "s.csv", "4")
    assert main(["plot", str(src), "--spec", "x=theta_h,y=nope"]) == 2
    assert main(["plot", str(src), "--spec", "garbage"]) == 2


def test_config_file_with_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nsize = fixture:path8\ntheta = 0.7\nsteps = 1\nchi = 4\nobservables = avg_z; z@3\n")
    out = tmp_path / "r.csv"
    assert main(["simulate", "--config", str(cfg), "--theta", "0.3", "--out", str(out)]) == 0
    rows = _rows(out)
    assert {r["observable"] for r in rows} == {"avg_z", "z@3"}
    assert all(float(r["theta_h"]) == 0.3 for r in rows)


def test_computation_error_exit_1(tmp_path):
    out = tmp_path / "r.csv"
    code = main(["simulate", "--size", "fixture:path8", "--theta", "0.5", "--steps", "2", "--chi", "4",
                 "--obs", "avg_z", "--bp", "--bp-tol", "1e-16", "--bp-iters", "1", "--out", str(out)])
    assert code == 1
    assert "ConvergenceError" in _rows(out)[0]["error"]


def test_oracle_over_capacity_is_computation_error(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle", "--size", "eagle127", "--theta", "0.2", "--steps", "1", "--obs", "avg_z",
                 "--out", str(out)]) == 1
