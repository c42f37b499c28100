"""Coupling constant metamorphosis, Jacobi and Staeckel transforms, curvature."""

import pytest
import sympy as sp

from stackel import (FunctionField, GradingError, NotASymmetryError, SystemDefinition,
                     ccm_from_parameter, ccm_transform, gaussian_curvature, jacobi_transform,
                     parse_expression, poisson_bracket, stackel_round_trip, stackel_transform_2nd,
                     stackel_transform_general)
from stackel.phase import as_phase


def test_ccm_sqrt_coupling_raises_degree_to_five(example):
    """Replacing b1 by -(H - E)/sqrt(x1) in the cubic gives a quintic polynomial."""
    sf = example(1)
    res = ccm_from_parameter(sf.symmetries["K3"], sf.hamiltonian, "b1", sf.parse("sqrt(x1)"))
    assert res.is_polynomial and res.numerator_degree == 5
    assert not poisson_bracket(res.value, res.hamiltonian)


def test_ccm_degree_oracle_sympy():
    """Independent oracle: the same substitution done by sympy."""
    x1, x2, p1, p2, b2, E = sp.symbols("x1 x2 p1 p2 b2 E", positive=True)
    b1 = -(p1**2 + p2**2 + b2 * x2 - E) / sp.sqrt(x1)
    K3 = p1**3 + sp.Rational(3, 2) * b1 * sp.sqrt(x1) * p1 - 3 * b1**2 / (4 * b2) * p2
    num, den = sp.fraction(sp.cancel(sp.together(K3)))
    assert sp.Poly(num, p1, p2).total_degree() == 5
    assert sp.Poly(den, p1, p2).total_degree() == 0


def test_ccm_linear_coupling_is_rational(example):
    sf = example(1)
    res = ccm_from_parameter(sf.symmetries["K3"], sf.hamiltonian, "b2", sf.parse("x2"))
    assert not res.is_polynomial and res.denominator_degree == 2


def test_ccm_rejects_non_symmetry(field):
    H = parse_expression("p1^2 + p2^2", field, "classical")
    K = parse_expression("x1*p1", field, "classical")
    with pytest.raises(NotASymmetryError):
        ccm_transform(K, H, parse_expression("x1", field, "scalar"))


def test_jacobi_reproduces_square_root_transform(example):
    """Jacobi transform of the square-root system with V folded into U."""
    sf2 = example(2)
    H0 = sf2.hamiltonian
    for name in ("K2", "K3"):
        got = jacobi_transform(sf2.symmetries[name], H0, sf2.U)
        want = as_phase(sf2.expected_object(f"Khat{name[1]}"))
        assert as_phase(got).field.lift(want) == as_phase(got)


def test_jacobi_rejects_non_symmetry(example):
    sf = example(2)
    with pytest.raises(NotASymmetryError):
        jacobi_transform(sf.symmetries["K2"], sf.hamiltonian, sf.parse("x1"))


def test_jacobi_constant_needs_order(example):
    """A bracket that collapses to a constant is graded explicitly."""
    sf = example(2)
    c = poisson_bracket(sf.symmetries["K2"], sf.symmetries["K3"])
    hat = jacobi_transform(c, sf.hamiltonian, sf.U, order=4)
    K2h = jacobi_transform(sf.symmetries["K2"], sf.hamiltonian, sf.U)
    K3h = jacobi_transform(sf.symmetries["K3"], sf.hamiltonian, sf.U)
    assert poisson_bracket(K2h.to_phase(), K3h.to_phase()) == hat.to_phase()


@pytest.fixture
def oscillator():
    """V = a x1^2 + b, U = x1^2 (a = 1, b = 0)."""
    f = FunctionField(("x1", "x2"), ("a", "b"))
    V = parse_expression("a*x1^2 + b", f, "scalar")
    return SystemDefinition(f, V, lam=f.one, coupling=("a", "b"), point={"a": 1, "b": 0})


def test_stackel_2nd_hand_computed(oscillator):
    """K = p1^2 + a x1^2: K0^U = x1^2, so K~ = K - H = -p2^2 - b."""
    f = oscillator.field
    K = parse_expression("p1^2 + a*x1^2", f, "classical")
    got = stackel_transform_2nd(K, oscillator)
    assert got == parse_expression("-p2^2 - b", f, "classical")


def test_stackel_general_agrees_with_2nd_order_when_linear(oscillator):
    f = oscillator.field
    K = parse_expression("p1^2 + a*x1^2", f, "classical")
    general = stackel_transform_general(K, oscillator)
    assert as_phase(general) == as_phase(stackel_transform_2nd(K, oscillator))


@pytest.mark.parametrize("text, shift", [("p1^2 + a*x1^2", "0"), ("p2^2 + b", "1")])
def test_stackel_round_trip(oscillator, text, shift):
    """Transforming with U and back with 1/U gives K - K0^1 H.

    K0^1 is the zero-grade part restricted at the point (a, b) = (0, 1)
    where V = 1; it vanishes for the first symmetry.
    """
    f = oscillator.field
    K = parse_expression(text, f, "classical")
    back = stackel_round_trip(K, oscillator, {"a": 0, "b": 1})
    want = K - oscillator.hamiltonian().scale(parse_expression(shift, f, "scalar"))
    assert as_phase(back) == as_phase(want)


def test_stackel_2nd_shape_checks(oscillator):
    f = oscillator.field
    with pytest.raises(GradingError):
        stackel_transform_2nd(parse_expression("p1", f, "classical"), oscillator)
    with pytest.raises(NotASymmetryError):
        stackel_transform_2nd(parse_expression("x1*p2^2", f, "classical"), oscillator)


def test_stackel_general_checks_parameter_grading(oscillator):
    f = oscillator.field
    K = parse_expression("p1^2 + a*x1^2 + a^2", f, "classical")
    with pytest.raises(GradingError):
        stackel_transform_general(K, oscillator)


@pytest.mark.parametrize("lam, curvature", [
    ("1", "0"),
    ("4/(1 + x1^2 + x2^2)^2", "1"),
    ("1/x2^2", "-1"),
    ("x1", "1/(2*x1^3)"),
])
def test_gaussian_curvature(lam, curvature):
    """Flat plane, round sphere, hyperbolic half plane and a Darboux metric."""
    f = FunctionField(("x1", "x2"))
    got = gaussian_curvature(parse_expression(lam, f, "scalar"))
    assert got == parse_expression(curvature, f, "scalar")
