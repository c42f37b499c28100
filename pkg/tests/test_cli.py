"""Command-line front end: subcommands, report layouts and exit codes."""

import io
import json
import subprocess
import sys

import pytest

from stackel.catalog import example_text
from stackel.cli import run_command


def run(*argv):
    out = io.StringIO()
    code = run_command(list(argv), out)
    return code, out.getvalue()


def test_jacobi_transform_of_cubic():
    """Folding V into U turns the cubic into the transformed cubic."""
    code, text = run("transform", "--kind", "jacobi", "--system", "example1.sys",
                     "--u", "b1*sqrt(x1)+b2*x2+b3", "--symmetry", "K3")
    assert code == 0
    assert "hamiltonian: (p1^2 + p2^2 - E)/(x2*b2 + sqrt(x1)*b1 + b3)" in text
    assert "verdict: pass" in text and "summary: 1 passed, 0 failed" in text


def test_ccm_reports_degree():
    code, text = run("transform", "--kind", "ccm", "--system", "example1", "--symmetry", "K3",
                     "--param", "b1", "--u", "sqrt(x1)")
    assert code == 0 and "momentum_degree: numerator 5, denominator 0" in text


@pytest.mark.parametrize("kind", ["stackel2", "stackel"])
def test_stackel_transforms(kind):
    code, text = run("transform", "--kind", kind, "--system", "example3", "--symmetry", "K2")
    assert code == 0, text


def test_quantum_command():
    code, text = run("quantum", "--system", "example4", "--symmetry", "K")
    assert code == 0
    assert "transformed_order: 3" in text


def test_quantum_order_violation_noted():
    code, text = run("quantum", "--system", "example8", "--symmetry", "K")
    assert code == 0
    assert "note: order bound violated" in text and "transformed_order: 5" in text


def test_numeric_command():
    code, text = run("numeric", "--system", "example2.sys", "--horizon", "10", "--tol", "1e-10")
    assert code == 0 and "drift Hhat=" in text


def test_verify_one_example():
    code, text = run("verify-paper", "--example", "3")
    assert code == 0 and "0 failed" in text


def test_records_layout_and_determinism():
    argv = ("--format", "records", "verify-paper", "--example", "1")
    a, b = run(*argv), run(*argv)
    assert a == b
    records = [json.loads(line) for line in a[1].splitlines()]
    assert records[0]["record"] == "header" and records[-1]["record"] == "summary"
    checks = [r for r in records if r["record"] == "check"]
    assert checks and set(checks[0]) == {"record", "name", "kind", "residual", "verdict", "detail"}


def test_global_flags_after_subcommand():
    code, text = run("verify-paper", "--example", "1", "--seed", "5", "--format", "text")
    assert code == 0 and "seed: 5" in text


def test_failure_exit_code(tmp_path):
    p = tmp_path / "bad.sys"
    p.write_text("[system]\nparameters = a\n[potential]\nV = a*x1\n"
                 "[symmetries]\nK = p2^2 + x1\n", encoding="utf-8")
    code, text = run("check", "--system", str(p))
    assert code == 1 and "verdict: FAIL" in text


@pytest.mark.parametrize("argv", [
    ["transform", "--kind", "jacobi", "--system", "nowhere.sys", "--symmetry", "K"],
    ["transform", "--kind", "ccm", "--system", "example1", "--symmetry", "K3"],
    ["quantum", "--system", "example1", "--symmetry", "K3"],
    ["transform", "--kind", "jacobi", "--system", "example1", "--symmetry", "K3", "--u", "x1^(1/3)"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _ = run(*argv)
    assert code == 2


def test_catalog_listing_and_show():
    code, text = run("catalog")
    assert code == 0 and len(text.splitlines()) == 9
    code, text = run("catalog", "--show", "4")
    assert text == example_text(4)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "stackel", "catalog"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("example1:")
