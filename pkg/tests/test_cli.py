import json
import math
import subprocess
import sys

import pytest

from simquad.cli import main
from simquad.quadrature import QuadratureRule
from simquad.systems import besselk_coeffs

FIG1_FIRST = "1    0.52720348133440875760  0.27736269648616286974  0.26086734230400106004"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rule_table_fig1(capsys):
    code, out, _ = run(capsys, "rule", "--system", "besselK", "--alpha", "1", "--nu", "0", "--N", "10", "--digits", "100", "--format", "table")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["j", "node", "weight1", "weight2"]
    assert lines[1].strip() == FIG1_FIRST.strip()
    assert lines[10].split()[1] == "485.08440564025807348828"
    assert len(lines) == 11


def test_rule_csv_fig3(capsys):
    code, out, _ = run(capsys, "rule", "--system", "besselI", "--nu", "0", "--c", "1", "--N", "10", "--digits", "50", "--format", "csv")
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()]
    assert rows[0] == ["j", "node", "weight1", "weight2"]
    assert len(rows) == 11
    assert rows[1][1].startswith("1.5319522277")
    assert rows[10][1].startswith("3.2759329636")


def test_rule_single_node_json(capsys):
    code, out, _ = run(capsys, "rule", "--system", "besselK", "--alpha", "1", "--nu", "0", "--N", "1", "--digits", "20")
    assert code == 0
    data = json.loads(out)
    assert data["nodes"] == ["4.0e+0"]
    assert data["weights1"] == ["1.0e+0"] and data["weights2"] == ["2.0e+0"]
    assert data["system"] == {"kind": "besselK", "alpha": "1", "nu": "0"}
    assert set(data["residuals"]) == {"right", "left", "newton"}


def test_rule_json_is_deterministic_and_round_trips(capsys):
    argv = ("rule", "--system", "besselI", "--nu", "0.5", "--c", "2", "--N", "7", "--digits", "30")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert QuadratureRule.from_json(first).to_json() == first


def test_integrate_formats(capsys):
    base = ("integrate", "--system", "besselK", "--alpha", "1", "--nu", "0", "--N", "10", "--digits", "30", "--f", "exp_neg")
    code, out, _ = run(capsys, *base)
    assert code == 0
    data = json.loads(out)
    assert data["I1"].startswith("1.940521520") and data["I2"].startswith("2.114457811")
    assert data["N"] == 10 and data["digits"] == 30
    code, out, _ = run(capsys, *base, "--format", "table")
    assert "I1 = 0.194052152" in out and "I2 = 0.211445781" in out
    code, out, _ = run(capsys, *base, "--format", "csv")
    assert out.splitlines()[0] == "N,digits,integrand,I1,I2"


def test_integrate_one_gives_zeroth_moments(capsys):
    code, out, _ = run(capsys, "integrate", "--system", "besselK", "--alpha", "1", "--nu", "0", "--N", "5", "--f", "one")
    data = json.loads(out)
    assert float(data["I1"]) == pytest.approx(1, rel=1e-25) and float(data["I2"]) == pytest.approx(2, rel=1e-25)


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", "--system", "besselI", "--nu", "0", "--c", "1", "--N", "5", "--format", "table")
    assert code == 0
    assert "measure 1: exact through degree 7 (claimed 7)" in out
    assert "measure 2: exact through degree 6 (claimed 6)" in out
    code, out, _ = run(capsys, "verify", "--system", "besselK", "--alpha", "1", "--nu", "0", "--N", "4")
    assert json.loads(out)["claimed"] == [5, 5]


def _custom(tmp_path, moments_ok=True, with_moments=True):
    exact = [besselk_coeffs("1", "0", n) for n in range(6)]
    data = {
        "b": [str(t[0]) for t in exact],
        "c": [str(t[1]) for t in exact[1:]],
        "d": [str(t[2]) for t in exact[2:]],
        "D": [["1", "0"], ["2", "4"]],
    }
    if with_moments:
        m1 = [math.factorial(n + 1) ** 2 for n in range(12)]
        if not moments_ok:
            m1[5] += 1
        data["moments1"] = [str(m) for m in m1]
        data["moments2"] = [str(math.factorial(n + 2) * math.factorial(n + 1)) for n in range(12)]
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_verify_failure_exit_code(capsys, tmp_path):
    path = _custom(tmp_path, moments_ok=False)
    code, out, _ = run(capsys, "verify", "--system", "custom", "--coeffs", path, "--N", "6", "--digits", "60", "--format", "csv")
    assert code == 4
    assert "FAIL" in out
    code, _, _ = run(capsys, "verify", "--system", "custom", "--coeffs", _custom(tmp_path), "--N", "6")
    assert code == 0


def test_verify_without_moments_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--system", "custom", "--coeffs", _custom(tmp_path, with_moments=False), "--N", "3")
    assert code == 2 and "moment" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("rule", "--system", "besselK", "--N", "3", "--digits", "5"),
        ("rule", "--system", "laguerre", "--N", "3"),
        ("rule", "--system", "besselK", "--N", "0"),
        ("rule", "--system", "besselK", "--alpha", "x", "--N", "3"),
        ("integrate", "--system", "besselK", "--N", "3", "--f", "sin"),
        ("rule", "--system", "besselK", "--alpha", "-2", "--N", "3"),
        ("rule", "--system", "custom", "--N", "3"),
        ("rule", "--system", "custom", "--coeffs", "/nonexistent.json", "--N", "3"),
        (),
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_numeric_failure_exit_code(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"b": ["0", "0", "0"], "c": ["-1", "-1"], "d": ["0"], "D": [["1", "0"], ["0", "1"]]}))
    code, _, err = run(capsys, "rule", "--system", "custom", "--coeffs", str(path), "--N", "3")
    assert code == 3 and "precision" in err


def test_out_file(capsys, tmp_path):
    target = tmp_path / "rule.json"
    code, out, _ = run(capsys, "rule", "--system", "besselI", "--N", "3", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["N"] == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "simquad", "rule", "--system", "besselK", "--alpha", "1", "--N", "1", "--format", "csv"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("1,4.0e+0,1.0e+0,2.0e+0")
