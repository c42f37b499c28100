"""Catalog suites: every check of every example, plus theorem-level checks."""

import pytest

from stackel.catalog import EXAMPLES, run_example, run_theorems


@pytest.fixture(scope="module")
def results():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = run_example(n)
        return cache[n]
    return get


@pytest.mark.parametrize("n", EXAMPLES)
def test_example_suite_passes(results, n):
    checks = results(n)
    assert checks
    failed = [(c.name, c.residual, c.detail) for c in checks if not c.verdict]
    assert not failed


@pytest.mark.parametrize("n, names", [
    (1, ["bracket.H.K2", "bracket.H.K3", "ccm.K3.sqrt_x1", "ccm.K3.x2", "rank", "flow"]),
    (2, ["jacobi.K2", "jacobi.K3", "homomorphism.bracket", "homomorphism.product", "flow"]),
    (3, ["bracket.H.R", "relation.K2R", "erratum.K4R", "erratum.Casimir", "fit.K2R",
         "stackel.Htilde", "stackel.pair", "rank.before", "rank.after", "fd.pairs"]),
    (4, ["transform.K", "telescope.K", "adjoint.K", "symbol.K"]),
    (5, ["relation.K2R", "relation.K4R", "telescope.K4", "lemma.second_order_quantization",
         "theorem.second_order_explicit", "symbol.morphism", "adjoint.forms"]),
    (6, ["transform.K", "adjoint.K"]),
    (7, ["transform.K", "erratum.L_printed"]),
    (8, ["transform.K", "darboux.U"]),
    (9, ["commutator.H.L2", "commutator.H.J2", "Htilde", "curvature.c0"]),
])
def test_suite_completeness(results, n, names):
    got = {c.name for c in results(n)}
    missing = [f"example{n}.{m}" for m in names if f"example{n}.{m}" not in got]
    assert not missing


def test_errata_report_both_sides(results):
    """An erratum passes only when the printed form fails and the correction holds."""
    errata = [c for c in results(3) if c.kind == "erratum"]
    assert errata and all("printed form residual nonzero" in c.detail for c in errata)


def test_order_violation_is_reported(results):
    by_name = {c.name: c for c in results(8)}
    assert "order bound violated" in by_name["example8.decompose.K"].detail
    assert "not preserved" in by_name["example8.transform.K"].detail


def test_theorem_checks():
    checks = run_theorems(20240817)
    assert {c.name for c in checks} >= {"theorems.separable.random", "theorems.stackel.commuting_pair",
                                        "theorems.stackel.trivial_restriction", "theorems.adjoint.laws"}
    assert all(c.verdict for c in checks)
