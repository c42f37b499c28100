"""Randomized algebraic laws (100 derandomized cases each).

Objects are drawn from small rational coefficient families in x1, x2 with
half-integer powers, a parameter ``a``, and optional denominators.
"""

import sympy as sp
from hypothesis import given, settings, strategies as st

from stackel import (DifferentialOperator, FunctionField, MomentumPolynomial, commutator, compose,
                     formal_adjoint, parse_expression, poisson_bracket, principal_symbol)

F = FunctionField(("x1", "x2"), ("a",))
N_CASES = 100

_DENOMS = ["1", "x1", "x1 + x2", "x2^2 + 1", "sqrt(x1) + 2"]
_WEIGHTS = ["1", "x1", "x1^2 + x2^2 + 1", "sqrt(x2)", "1/(x1 + 1)"]


@st.composite
def scalars(draw, max_terms=3, half=True, denom=True):
    terms = []
    for _ in range(draw(st.integers(1, max_terms))):
        c = draw(st.sampled_from([-3, -2, -1, 1, 2, 3]))
        e1 = draw(st.integers(0, 4 if half else 2))
        e2 = draw(st.integers(0, 4 if half else 2))
        k = draw(st.integers(0, 1))
        e1 = f"({e1}/2)" if half else str(e1)
        e2 = f"({e2}/2)" if half else str(e2)
        terms.append(f"({c})*x1^{e1}*x2^{e2}*a^{k}")
    d = draw(st.sampled_from(_DENOMS)) if denom else "1"
    return parse_expression(f"({' + '.join(terms)})/({d})", F, "scalar")


@st.composite
def momentum_polys(draw, degree=None, max_degree=2, **kw):
    """A momentum polynomial, homogeneous of ``degree`` when given."""
    out = MomentumPolynomial.zero(F)
    for _ in range(draw(st.integers(1, 3))):
        d = degree if degree is not None else draw(st.integers(0, max_degree))
        i = draw(st.integers(0, d))
        mono = MomentumPolynomial.momentum(0, F) ** i * MomentumPolynomial.momentum(1, F) ** (d - i) \
            if d else MomentumPolynomial.constant(1, F)
        out = out + mono.scale(draw(scalars(**kw)))
    return out


@st.composite
def operators(draw, max_order=2, **kw):
    out = DifferentialOperator.zero(F)
    for _ in range(draw(st.integers(1, 3))):
        d = draw(st.integers(0, max_order))
        i = draw(st.integers(0, d))
        out = out + DifferentialOperator.derivative((i, d - i), F).scale(draw(scalars(**kw)))
    return out


weights = st.sampled_from(_WEIGHTS).map(lambda t: parse_expression(t, F, "scalar"))


# -- Poisson bracket ----------------------------------------------------------------

@settings(max_examples=N_CASES)
@given(momentum_polys(), momentum_polys())
def test_poisson_antisymmetry(f, g):
    assert poisson_bracket(f, g) == -poisson_bracket(g, f)


@settings(max_examples=N_CASES)
@given(momentum_polys(), momentum_polys(), momentum_polys())
def test_poisson_leibniz(f, g, h):
    assert poisson_bracket(f, g * h) == poisson_bracket(f, g) * h + g * poisson_bracket(f, h)


@settings(max_examples=N_CASES)
@given(momentum_polys(max_degree=2, denom=False), momentum_polys(max_degree=2, denom=False),
       momentum_polys(max_degree=2))
def test_poisson_jacobi(f, g, h):
    total = (poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f))
             + poisson_bracket(h, poisson_bracket(f, g)))
    assert not total


# -- adjoints -----------------------------------------------------------------------

@settings(max_examples=N_CASES)
@given(operators(), weights)
def test_adjoint_involution(T, lam):
    assert formal_adjoint(formal_adjoint(T, lam), lam) == T.lift(formal_adjoint(T, lam).field)


@settings(max_examples=N_CASES)
@given(operators(max_order=2), operators(max_order=1), weights)
def test_adjoint_anti_homomorphism(A, B, lam):
    lhs = formal_adjoint(compose(A, B), lam)
    rhs = compose(formal_adjoint(B, lam), formal_adjoint(A, lam))
    assert lhs == rhs


# -- grading ------------------------------------------------------------------------

@settings(max_examples=N_CASES)
@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_bracket_grading_law(m, n, data):
    """{deg m, deg n} is homogeneous of degree m + n - 1 (or zero)."""
    f = data.draw(momentum_polys(degree=m))
    g = data.draw(momentum_polys(degree=n))
    br = poisson_bracket(f, g)
    assert not br or br.degrees() == {m + n - 1}


@settings(max_examples=N_CASES)
@given(operators(max_order=2), operators(max_order=2))
def test_commutator_order_and_symbol(A, B):
    """ord [A, B] <= ord A + ord B - 1, and the symbol is the bracket of symbols there."""
    C = commutator(A, B)
    top = A.order() + B.order() - 1
    assert C.order() <= max(top, -1) or not C
    if top >= 0:
        want = poisson_bracket(principal_symbol(A, -1), principal_symbol(B, -1))
        got = principal_symbol(C, -1) if C.order() == top else MomentumPolynomial.zero(F)
        assert got == want.homogeneous_part(top)


# -- canonical forms ----------------------------------------------------------------

def _to_sympy(s):
    x1, x2 = sp.symbols("x1 x2", positive=True)
    return sp.sympify(str(s).replace("^", "**"), locals={"x1": x1, "x2": x2, "a": sp.Symbol("a")})


@settings(max_examples=N_CASES)
@given(scalars(), scalars(), scalars())
def test_canonical_form_uniqueness(u, v, w):
    """Equal values built along different routes have one printed form and one hash."""
    w = w if w else F.one
    routes = [u * v + u * w, u * (v + w), (u * w * v + u * w * w) / w]
    assert all(r == routes[0] for r in routes)
    assert len({str(r) for r in routes}) == 1 and len({hash(r) for r in routes}) == 1
    again = parse_expression(str(routes[0]), F, "scalar")
    assert again == routes[0] and str(again) == str(routes[0])


@settings(max_examples=N_CASES)
@given(scalars(half=False))
def test_canonical_form_matches_sympy(s):
    """sympy's cancelled form reads back to the same canonical object."""
    text = str(sp.cancel(_to_sympy(s))).replace("**", "^")
    assert parse_expression(text, F, "scalar") == s


@settings(max_examples=N_CASES)
@given(operators())
def test_operator_print_parse(T):
    assert parse_expression(str(T), F, "quantum") == T
