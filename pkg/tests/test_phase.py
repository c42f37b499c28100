"""Momentum polynomials, Poisson brackets, grading and rank."""

import pytest

from stackel import (FunctionField, GradingError, MomentumPolynomial, SystemDefinition,
                     determining_equations, functional_independence, grade_decompose,
                     is_constant_of_motion, parse_expression, poisson_bracket)
from stackel.phase import as_phase


def P(text, f):
    return parse_expression(text, f, "classical")


def test_canonical_brackets(field):
    x1, p1, p2 = P("x1", field), P("p1", field), P("p2", field)
    assert poisson_bracket(x1, p1) == P("1", field)
    assert not poisson_bracket(x1, p2)
    assert not poisson_bracket(p1, p2)


def test_angular_momentum_commutes_with_rotation_invariant(field):
    L = P("x1*p2 - x2*p1", field)
    H = P("p1^2 + p2^2 + a*(x1^2 + x2^2) + b/(x1^2 + x2^2)", field)
    assert is_constant_of_motion(H, L)
    assert not is_constant_of_motion(P("p1^2 + p2^2 + a*x1", field), L)


def test_example1_symmetries(example):
    """The square-root potential has a quadratic and a cubic constant."""
    sf = example(1)
    for name in ("K2", "K3"):
        report = is_constant_of_motion(sf.hamiltonian, sf.symmetries[name])
        assert report.verdict and not report.residual


def test_bracket_of_rational_phase_functions(field):
    """A momentum-rational phase function takes the quotient-rule path."""
    H = P("p1^2 + p2^2", field)
    fr = as_phase(P("p1", field)) / as_phase(P("p2", field))
    assert not poisson_bracket(H, fr)
    g = as_phase(P("x1*p1", field)) / as_phase(P("p2", field))
    assert poisson_bracket(H, g) == as_phase(P("-2*p1^2", field)) / as_phase(P("p2", field))


def test_grade_decompose_example1(example):
    K = grade_decompose(example(1).symmetries["K3"])
    assert K.order == 3 and len(K.parts) == 2
    assert K.part(3) == P("p1^3", example(1).field)
    assert K.total() == example(1).symmetries["K3"]
    assert K.parameter_grading_violations(["b1", "b2"]) == []


def test_grade_decompose_higher_order(field):
    """A constant can be graded as order 4: its top parts are zero."""
    K = grade_decompose(P("a^2", field), order=4)
    assert K.order == 4 and not K.part(4) and not K.part(2) and K.part(0) == P("a^2", field)
    with pytest.raises(GradingError):
        grade_decompose(P("p1^2 + p1", field))
    with pytest.raises(GradingError):
        grade_decompose(P("p1^3", field), order=2)


def test_determining_equations_vanish(example):
    sf = example(1)
    eqs = determining_equations(grade_decompose(sf.symmetries["K3"]), sf.system())
    assert [name for name, _ in eqs] == ["{K3,H0}", "{K3,U}+{K1,H0}", "{K1,U}"]
    assert all(not r for _, r in eqs)


def test_rank_detects_dependence(example):
    """(H, 2H) has rank 1; (H, K2, K3) of the square-root system has rank 3."""
    sf = example(1)
    H = sf.hamiltonian
    assert functional_independence([H, H * 2], seed=1).rank == 1
    rep = functional_independence([H, sf.symmetries["K2"], sf.symmetries["K3"]], seed=1)
    assert rep.rank == 3 and rep.independent


def test_system_definition_metric_and_conformal(field):
    lam = parse_expression("x1", field, "scalar")
    sysd = SystemDefinition(field, parse_expression("a*x2", field, "scalar"), lam=lam, coupling=("a",),
                            U=parse_expression("x2", field, "scalar"), point={"a": 1})
    assert sysd.kinetic() == P("(p1^2 + p2^2)/x1", field)
    g = [[1 / lam, field.zero], [field.zero, 1 / lam]]
    assert SystemDefinition(field, 0, metric=g).kinetic() == sysd.kinetic()
    assert sysd.hamiltonian() == P("(p1^2 + p2^2)/x1 + a*x2", field)


def test_momentum_polynomial_algebra(field):
    A, B = P("x1*p1 + a", field), P("p2^2", field)
    assert (A * B).degree() == 3
    assert (A + B - A) == B
    assert A ** 2 == A * A
    assert P("p1*p2", field).coefficient((1, 1)) == field.one
    assert MomentumPolynomial.momentum(1, field) == P("p2", field)
