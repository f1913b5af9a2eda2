from __future__ import annotations

import json
import math

import numpy as np
import pytest

from fracdiffusive import __version__
from fracdiffusive.cli import Manifest, WORKERS_ENV, format_csv, run, worker_count

PASSING_MANIFEST = """
version = 1
output_dir = "out"
parallelism = 2

[[scenarios]]
name = "hom_u0"
n = 1
alpha = 0.5
q = "inf"
case = "hom_u0"
tolerance = 0.05
points = 512
half_width = 150.0

[[scenarios]]
name = "hom_u1"
n = 1
alpha = 0.5
q = "inf"
case = "hom_u1"
tolerance = 0.05
points = 512
half_width = 150.0
"""

BLOWUP_PROBLEM = """
alpha = 0.5
power = 2

[grid]
dim = 1
points = 128
half_width = 40.0

[u0]
profile = "bump"
amplitude = 5.0
width = 2.0

[time]
t_final = 10.0
step = 0.05
n_outputs = 11
"""


def write(path, text):
    path.write_text(text)
    return str(path)


def test_ml_zero(capsys):
    assert run(["ml", "--a", "1.5", "--beta", "1", "--x", "0"]) == 0
    assert capsys.readouterr().out.strip() == "1.0"


def test_ml_table_and_decompose(capsys):
    assert run(["ml", "--a", "1.5", "--beta", "1", "--x", "1", "20"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith(f"# fracdiffusive {__version__} params: ")
    assert lines[1] == "x,value" and len(lines) == 4
    assert run(["ml", "--a", "1.5", "--beta", "1", "--x", "20", "--decompose"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1].startswith("x,oscillatory,algebraic,remainder")


def test_ml_classical_orders_use_series(capsys):
    assert run(["ml", "--a", "1", "--beta", "1", "--x", "1"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(math.exp(-1.0), rel=1e-15)


@pytest.mark.parametrize("argv", [["ml", "--a", "1.5", "--beta", "1", "--x", "-1"],
                                  ["ml", "--a", "3", "--beta", "1", "--x", "1"],
                                  ["ml", "--beta", "1", "--x", "1"],
                                  ["bogus"],
                                  []])
def test_validation_failures_exit_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_frac_from_csv(tmp_path, capsys):
    t = np.linspace(0.0, 1.0, 1001)
    src = tmp_path / "sq.csv"
    src.write_text("t,value\n" + "\n".join(f"{a!r},{a * a!r}" for a in t.tolist()) + "\n")
    assert run(["frac", "--input", str(src), "--op", "caputo", "--order", "1.5", "--at", "1.0"]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert float(last.split(",")[1]) == pytest.approx(2.0 / math.gamma(1.5), rel=1e-10)


def test_frac_rejects_nonuniform(tmp_path, capsys):
    src = write(tmp_path / "bad.csv", "0,0\n0.1,1\n0.3,2\n0.4,3\n0.5,4\n")
    assert run(["frac", "--input", src, "--op", "integral", "--order", "0.5"]) == 2


def test_kernel_outputs(tmp_path, capsys):
    slice_path = tmp_path / "k.csv"
    assert run(["kernel", "--alpha", "0.5", "--beta", "1", "--t", "1", "--points", "256",
                "--half-width", "30", "--slice-output", str(slice_path)]) == 0
    table = capsys.readouterr().out.splitlines()
    assert table[1] == "q,norm"
    assert float(table[2].split(",")[1]) == pytest.approx(1.0, abs=1e-3)
    rows = slice_path.read_text().splitlines()
    assert rows[1] == "x,value" and len(rows) == 2 + 256


def test_kernel_bad_beta(capsys):
    assert run(["kernel", "--alpha", "0.5", "--beta", "7", "--t", "1"]) == 2


def test_solve_blowup_exit_3(tmp_path, capsys):
    prob = write(tmp_path / "p.toml", BLOWUP_PROBLEM)
    out = tmp_path / "res"
    assert run(["solve", "--problem", prob, "--output-dir", str(out)]) == 3
    info = json.loads((out / "solve.json").read_text())
    assert info["status"] == "blowup" and 0 < info["blowup_time"] < 10
    assert (out / "norms.csv").read_text().splitlines()[1] == "t,L1,L2,Linf"


def test_solve_completed(tmp_path, capsys):
    prob = write(tmp_path / "p.toml", BLOWUP_PROBLEM.replace("amplitude = 5.0", "amplitude = 0.01"))
    out = tmp_path / "res"
    assert run(["solve", "--problem", prob, "--output-dir", str(out)]) == 0
    snaps = (out / "snapshots.csv").read_text().splitlines()
    assert snaps[1].split(",")[0] == "x" and len(snaps[1].split(",")) == 12


def test_solve_linear_forced(tmp_path, capsys):
    text = BLOWUP_PROBLEM.replace("power = 2\n", "") + '\n[forcing]\nprofile = "gaussian"\nK = 1.0\neta = 2.0\n'
    prob = write(tmp_path / "p.toml", text)
    assert run(["solve", "--problem", prob, "--output-dir", str(tmp_path / "r")]) == 0


@pytest.mark.parametrize("mutation", [("alpha = 0.5", "alpha = 1.5"), ("[grid]", "[grd]"),
                                      ('profile = "bump"', 'profile = "square"'), ("t_final = 10.0", "")])
def test_solve_invalid_exit_2(tmp_path, capsys, mutation):
    prob = write(tmp_path / "p.toml", BLOWUP_PROBLEM.replace(*mutation))
    assert run(["solve", "--problem", prob, "--output-dir", str(tmp_path / "r")]) == 2


def test_sweep_all_pass_and_deterministic(tmp_path, capsys):
    man = write(tmp_path / "m.toml", PASSING_MANIFEST)
    assert run(["sweep", "--manifest", man]) == 0
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["all_pass"] and summary["n_passed"] == 2
    first = (tmp_path / "out" / "results.csv").read_bytes()
    series = (tmp_path / "out" / "series" / "hom_u0.csv").read_bytes()
    assert run(["sweep", "--manifest", man, "--workers", "1"]) == 0
    assert (tmp_path / "out" / "results.csv").read_bytes() == first
    assert (tmp_path / "out" / "series" / "hom_u0.csv").read_bytes() == series
    assert run(["report", "--summary", str(tmp_path / "out" / "summary.json")]) == 0
    assert "2/2 passed" in capsys.readouterr().out


def test_sweep_failing_scenario_exit_1(tmp_path, capsys):
    text = PASSING_MANIFEST.replace("tolerance = 0.05", "tolerance = 1e-6", 1)
    man = write(tmp_path / "m.toml", text)
    assert run(["sweep", "--manifest", man, "--workers", "1"]) == 1
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert not summary["all_pass"] and summary["n_passed"] == 1


@pytest.mark.parametrize("mutation", [("version = 1", "version = 2"), ("tolerance = 0.05", "tolerance = -1.0"),
                                      ('case = "hom_u0"', 'case = "nope"'), ("points = 512", "points = 500"),
                                      ("half_width = 150.0", "halfwidth = 150.0")])
def test_sweep_invalid_manifest_exit_2(tmp_path, capsys, mutation):
    man = write(tmp_path / "m.toml", PASSING_MANIFEST.replace(*mutation, 1))
    assert run(["sweep", "--manifest", man]) == 2


def test_manifest_requires_scenarios(tmp_path):
    with pytest.raises(ValueError):
        Manifest.from_dict({"version": 1, "scenarios": []}, tmp_path)


def test_worker_count(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert worker_count(4, 10) == 4
    assert worker_count(4, 2) == 2
    assert worker_count(4, 10, 3) == 3
    monkeypatch.setenv(WORKERS_ENV, "1")
    assert worker_count(4, 10) == 1
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(ValueError):
        worker_count(4, 10)


def test_report_exponents(capsys):
    assert run(["report", "--exponents", "--dims", "1", "2", "--alphas", "0.5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].startswith("n,alpha,p_bar,p_tilde")
    assert lines[2].split(",")[3] == "7.0000000000000009" or float(lines[2].split(",")[3]) == pytest.approx(7.0)
    assert run(["report"]) == 2


def test_csv_format_roundtrip():
    text = format_csv(("a", "b"), [(1, 0.1), (math.inf, float("nan"))], {"q": math.inf})
    lines = text.splitlines()
    assert lines[0] == f'# fracdiffusive {__version__} params: {{"q":"inf"}}'
    assert lines[2] == "1,0.10000000000000001" and lines[3] == "inf,nan"
