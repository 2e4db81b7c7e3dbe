import json
import subprocess
import sys

import pytest

from pshapiro import cli
from pshapiro import ps_verify as ps


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


# ---- reports ----

def test_admissible_reports_delta(capsys):
    data = run_json(capsys, "admissible", "--word", "BAABAA", "--gamma", "97/100")
    assert data["kappa"] == "13/40" and data["lambda"] == "11/20"
    assert data["gamma_threshold"] == "238/247"
    assert data["delta_max"] == "53/7500"
    assert data["binding_at_gamma"] == ["T1", "T2"]


def test_admissible_by_coordinates(capsys):
    data = run_json(capsys, "admissible", "--kappa", "1/2", "--lambda", "1/2")
    assert data["gamma_threshold"] == "28/29"


def test_bound(capsys):
    assert run_json(capsys, "bound", "--c", "1.01")["bound"] == 68
    assert run_json(capsys, "bound", "--c", "51/50")["bound"] == 107


def test_pairs_max_len_zero(capsys):
    data = run_json(capsys, "pairs", "--max-len", "0")
    assert data["count"] == 1
    assert data["pairs"][0] == {"word": "", "kappa": "1/2", "lambda": "1/2"}


def test_pairs_best(capsys):
    data = run_json(capsys, "pairs", "--max-len", "6", "--best")
    assert json.dumps(data).count("BAABAA") >= 1


def test_scan_csv_default(capsys):
    code, out, _ = run(capsys, "scan", "--c", "1.02", "--n-lo", "1", "--n-hi", "6")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ps.CSV_HEADER
    assert lines[2] == "2,0,,107,0"
    assert lines[5] == "5,2,1,107,1"


def test_verify_summary(capsys):
    data = run_json(capsys, "verify", "--c", "1.02", "--n-lo", "1000", "--n-hi", "1100")
    assert data["n_total"] == 101 and data["n_exceptions"] == 0 and data["bound"] == 107


@pytest.mark.parametrize("argv", [
    ("vaaler", "5", "--points", "11"),
    ("theta", "4", "3", "--points", "50"),
    ("sieve", "1000", "31", "--check", "2000"),
    ("vaughan", "50", "1"),
    ("expsum", "W", "--N", "100000", "--c", "1.02", "--P", "50", "--d", "3"),
    ("expsum", "weyl", "--seed", "3", "--Q", "5"),
    ("gamma0", "--N", "1000000", "--c", "1.02", "--z", "3", "--D", "100"),
])
def test_other_commands_render_both_formats(capsys, argv):
    assert run(capsys, *argv)[0] == 0
    code, out, err = run(capsys, *argv, "--format", "csv")
    assert code == 0, err
    assert out.count("\n") >= 2


def test_sieve_csv_lists_weights(capsys):
    code, out, _ = run(capsys, "sieve", "1000", "31", "--format", "csv")
    assert code == 0
    rows = out.splitlines()
    assert len(rows) == 21 and rows[1] == "1,1,1"


# ---- formatting ----

def test_float_formatting_round_trips():
    for x in (0.1, 1 / 3, 1e-300, 2.0 ** 60, -5e-17):
        assert float(cli.fmt_float(x)) == x
    assert cli.fmt_float(float("nan")) == "null"


def test_to_json_types():
    from fractions import Fraction
    import numpy as np
    text = cli.to_json({"f": Fraction(3, 7), "z": 1 + 2j, "a": np.arange(3), "b": np.bool_(True), "n": None})
    data = json.loads(text)
    assert data == {"f": "3/7", "z": {"re": 1, "im": 2}, "a": [0, 1, 2], "b": True, "n": None}
    with pytest.raises(TypeError):
        cli.to_json({"x": object()})


def test_out_file(capsys, tmp_path):
    path = tmp_path / "bound.json"
    code, out, _ = run(capsys, "bound", "--c", "1.03", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["bound"] == 242


# ---- exit codes ----

def test_usage_errors(capsys):
    assert run(capsys, "bound")[0] == cli.EXIT_USAGE
    assert run(capsys, "admissible", "--gamma", "97/100")[0] == cli.EXIT_USAGE
    assert run(capsys, "bound", "--c", "abc")[0] == cli.EXIT_USAGE
    assert run(capsys)[0] == cli.EXIT_USAGE
    assert run(capsys, "scan", "--c", "1.02", "--n-lo", "1", "--n-hi", "5", "--workers", "0")[0] == cli.EXIT_USAGE


def test_unknown_command_is_usage_error(capsys):
    assert run(capsys, "frobnicate")[0] == cli.EXIT_USAGE
    assert run(capsys, "--help")[0] == 0


def test_precondition_errors(capsys):
    code, _, err = run(capsys, "admissible", "--word", "BAABAA", "--gamma", "1/2")
    assert code == cli.EXIT_PRECONDITION and "precondition" in err
    assert run(capsys, "bound", "--c", "2")[0] == cli.EXIT_PRECONDITION
    assert run(capsys, "scan", "--c", "1.02", "--n-lo", "10", "--n-hi", "5")[0] == cli.EXIT_PRECONDITION


def test_memory_guard_exit(capsys):
    code, _, err = run(capsys, "scan", "--c", "1.02", "--n-lo", "1", "--n-hi", str(10**9))
    assert code == cli.EXIT_MEMORY and "memory" in err


def test_precision_cap_exit(capsys, monkeypatch):
    def boom(cfg):
        raise ps.PrecisionCapError("forced")
    monkeypatch.setattr(ps, "verify_theorem", boom)
    assert run(capsys, "verify", "--c", "1.02", "--n-lo", "1", "--n-hi", "5")[0] == cli.EXIT_PRECISION


# ---- selftests ----

@pytest.mark.parametrize("command", ["pairs", "admissible", "vaaler", "sieve", "scan"])
def test_selftest_passes(capsys, command):
    code, out, _ = run(capsys, command, "--selftest")
    assert code == 0
    assert out and all(line.startswith("PASS ") for line in out.splitlines())


def test_selftest_failure_exit(capsys, monkeypatch):
    monkeypatch.setattr(cli.selftest, "run", lambda name: [("forced", False)])
    code, out, _ = run(capsys, "pairs", "--selftest")
    assert code == cli.EXIT_SELFTEST and out == "FAIL forced\n"


# ---- determinism ----

def test_scan_workers_byte_identical(tmp_path, capsys):
    paths = []
    for w in ("1", "8"):
        p = tmp_path / f"scan{w}.csv"
        code, _, err = run(capsys, "scan", "--c", "1.02", "--n-lo", "1001", "--n-hi", "30000",
                           "--segment", "3000", "--workers", w, "--out", str(p))
        assert code == 0, err
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "pshapiro", "bound", "--c", "1.02"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["bound"] == 107
