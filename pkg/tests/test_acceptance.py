"""Acceptance criteria, one test and one printed pass/fail line each.

Run ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py`` for the bare list.
"""

from __future__ import annotations

import subprocess
import sys
import time
from functools import lru_cache
from pathlib import Path

import pytest

from stackel import (alpha_decompose, ccm_from_parameter, jacobi_transform, poisson_bracket,
                     telescoping_identity)
from stackel.catalog import load_example, run_example, run_theorems
from stackel.numeric.harness import fd_bracket_check, flow_conserve
from stackel.phase import as_phase

RESULTS: list[str] = []


@lru_cache(maxsize=None)
def suite(n: int):
    t = time.perf_counter()
    checks = run_example(n)
    return {c.name: c for c in checks}, time.perf_counter() - t


def _all_pass(checks) -> list[str]:
    return [name for name, c in checks.items() if not c.verdict]


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


# -- criteria ---------------------------------------------------------------------

def square_root_system():
    """Brackets vanish; CCM degree 5 for sqrt(x1), flagged rational for x2; each < 1 s."""
    sf = load_example(1)
    H, K2, K3 = sf.hamiltonian, sf.symmetries["K2"], sf.symmetries["K3"]
    (b2, b3), t0 = _timed(lambda: (poisson_bracket(H, K2), poisson_bracket(H, K3)))
    r1, t1 = _timed(lambda: ccm_from_parameter(K3, H, "b1", sf.parse("sqrt(x1)")))
    r2, t2 = _timed(lambda: ccm_from_parameter(K3, H, "b2", sf.parse("x2")))
    ok = (not b2 and not b3 and r1.is_polynomial and r1.numerator_degree == 5
          and not r2.is_polynomial and max(t0, t1, t2) < 1.0)
    return ok, (f"sqrt(x1): degree {r1.numerator_degree}; x2: rational "
                f"({r2.numerator_degree}/{r2.denominator_degree}); slowest {max(t0, t1, t2):.2f} s")


def jacobi_example():
    """Printed transformed quadratic and cubic reproduced, both commute with Hhat; < 2 s."""
    sf = load_example(2)

    def body():
        Hhat = as_phase(sf.expected_object("Hhat"))
        ok = True
        for k in ("K2", "K3"):
            got = as_phase(jacobi_transform(sf.symmetries[k], sf.hamiltonian, sf.U))
            want = as_phase(sf.expected_object(f"Khat{k[1]}"))
            fld = got.field.union(want.field).union(Hhat.field)
            ok = ok and fld.lift(got) == fld.lift(want)
            ok = ok and not poisson_bracket(fld.lift(got), fld.lift(Hhat))
        return ok
    ok, t = _timed(body)
    return ok and t < 2.0, f"{t:.2f} s"


def homomorphism():
    """Jacobi transform respects brackets and products exactly."""
    sf = load_example(2)
    K2, K3, H0, U = sf.symmetries["K2"], sf.symmetries["K3"], sf.hamiltonian, sf.U
    h2, h3 = (as_phase(jacobi_transform(k, H0, U)) for k in (K2, K3))
    fld = h2.field.union(h3.field)
    br = as_phase(jacobi_transform(poisson_bracket(K2, K3), H0, U, order=4))
    prod = as_phase(jacobi_transform(K2 * K3, H0, U))
    ok_br = fld.lift(br) == poisson_bracket(fld.lift(h2), fld.lift(h3))
    ok_prod = fld.lift(prod) == fld.lift(h2) * fld.lift(h3)
    return ok_br and ok_prod, f"bracket {ok_br} (graded as order 4), product {ok_prod}"


def fourth_order_classical():
    """Brackets, relations, fit, general transform, ranks; < 60 s."""
    checks, t = suite(3)
    need = ["bracket.H.K2", "bracket.H.K4", "bracket.H.R", "erratum.K4R", "erratum.Casimir",
            "relation.K2R", "fit.K2R", "stackel.Htilde", "stackel.pair", "stackel.K2", "stackel.K4",
            "rank.before", "rank.after"]
    missing = [n for n in need if f"example3.{n}" not in checks]
    bad = _all_pass(checks)
    ok = not missing and not bad and t < 60.0
    return ok, (f"{len(checks)} checks, {len(bad)} failed, {t:.1f} s; {{K4,R}} and Casimir hold "
                f"in corrected form only (printed 40c^2 -> 4c^2, (b - c) -> (b - 2c)); "
                f"{{K2,R}} closes with K1 := K2")


def quantum_suite():
    """Examples 4-9: adjoints, lemma, explicit form, commuting transforms, relations; < 120 s."""
    total, bad, notes = 0.0, [], []
    for n in (4, 5, 6, 7, 8, 9):
        checks, t = suite(n)
        total += t
        bad.extend(_all_pass(checks))
    ex5, _ = suite(5)
    need = ["adjoint.forms", "lemma.second_order_quantization", "theorem.second_order_explicit",
            "commutator.H.K2", "commutator.H.K4", "commutator.H.R", "relation.K4R", "relation.K2R"]
    missing = [n for n in need if f"example5.{n}" not in ex5]
    for n in (4, 6, 7, 8):
        checks, _ = suite(n)
        if f"example{n}.transform.K" not in checks:
            missing.append(f"example{n}.transform.K")
    ex8, _ = suite(8)
    detail = ex8["example8.transform.K"].detail
    if "not preserved" in detail:
        notes.append("example 8 cubic transforms to order 5 (commutes exactly)")
    ok = not bad and not missing and total < 120.0
    return ok, f"{len(bad)} failed, {total:.1f} s; " + "; ".join(notes)


def telescoping():
    """The telescoping identity holds symbolically for N = 3 and N = 4."""
    out = []
    for n, name, N in ((4, "K", 3), (5, "K4", 4)):
        sf = load_example(n)
        Ka = sf.alpha_family(sf.symmetries[name])
        fam = alpha_decompose(Ka, N, sf.hamiltonian, sf.U, alpha=sf.alpha)
        out.append(telescoping_identity(fam, sf.shift).holds)
    return all(out), f"N = 3: {out[0]}, N = 4: {out[1]}"


def symbol_morphism():
    """symbol([K2, K4]) top grade equals {symbol K2, symbol K4} and the classical R top grade."""
    checks, _ = suite(5)
    c = checks["example5.symbol.morphism"]
    return c.verdict, c.detail


def property_suites():
    """Randomized laws, 100 derandomized cases each, zero failures."""
    path = Path(__file__).with_name("test_properties.py")
    res = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(path)],
                         capture_output=True, text=True)
    last = res.stdout.strip().splitlines()[-1] if res.stdout.strip() else res.stderr
    return res.returncode == 0 and "failed" not in last, last


def numeric_suite():
    """Drift < 1e-6 at T = 10, tol = 1e-10 for the first two examples; FD deviation < 1e-6."""
    drifts = []
    for n, objs in ((1, ("H", "K2", "K3")), (2, ("Hhat", "Khat2", "Khat3"))):
        sf = load_example(n)
        num = sf.numeric
        get = (lambda k, sf=sf: sf.bindings()[k]) if n == 1 else (lambda k, sf=sf: sf.expected_object(k))
        K = {k: get(k) for k in objs}
        rep = flow_conserve(K[objs[0]], K, num["x0"], num["p0"], num["params"], T=10.0, tol=1e-10)
        drifts.append(rep.max_drift if not rep.truncated else float("inf"))
    sf = load_example(3)
    H, K2, K4 = sf.hamiltonian, sf.symmetries["K2"], sf.symmetries["K4"]
    fd = max(fd_bracket_check(f, g, points=5).max_deviation for f, g in ((H, K2), (H, K4), (K2, K4)))
    ok = max(drifts) < 1e-6 and fd < 1e-6
    return ok, f"drift {drifts[0]:.1e} / {drifts[1]:.1e}, fd deviation {fd:.1e}"


CRITERIA = [
    (1, "square-root system and CCM", square_root_system),
    (2, "Jacobi transform example", jacobi_example),
    (3, "Jacobi homomorphism", homomorphism),
    (4, "fourth-order classical system", fourth_order_classical),
    (5, "quantum suite", quantum_suite),
    (6, "telescoping identity N = 3, 4", telescoping),
    (7, "principal-symbol morphism", symbol_morphism),
    (8, "property suites", property_suites),
    (9, "numeric suite", numeric_suite),
]


def _line(n, title, fn) -> tuple[bool, str]:
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # reported as a failing line, never hidden
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t
    return ok, f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title} ({dt:.1f} s): {detail}"


@pytest.mark.parametrize("n, title, fn", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(n, title, fn):
    ok, line = _line(n, title, fn)
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_theorem_level_checks():
    """Catalog completeness also covers the theorem-level checks."""
    assert all(c.verdict for c in run_theorems(20240817))


if __name__ == "__main__":
    failed = 0
    for n, title, fn in CRITERIA:
        ok, line = _line(n, title, fn)
        failed += not ok
        print(line, flush=True)
    sys.exit(1 if failed else 0)
