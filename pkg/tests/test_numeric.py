"""Numeric harness: evaluation, finite-difference brackets, trajectory drift, kernels."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from stackel import FunctionField, SingularPointError, parse_expression
from stackel.numeric import KERNEL, _pykernels
from stackel.numeric.harness import (CompiledFunctions, Sampler, eval_at, fd_bracket_check,
                                     flow_conserve, max_abs_at_random)
from stackel.phase import as_phase

try:
    from stackel.numeric import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def test_eval_hand_value(example):
    """H = p1^2 + p2^2 + b1 sqrt(x1) + b2 x2 at x = (1, 1), p = (1, 0), b = (1, 1) is 3."""
    pt = {"x1": 1.0, "x2": 1.0, "p1": 1.0, "p2": 0.0, "b1": 1.0, "b2": 1.0, "E": 0.0}
    assert eval_at(example(1).hamiltonian, pt) == 3.0


def test_eval_matches_direct_formula(example):
    """Two evaluation paths for the quadratic symmetry of the fourth-order system."""
    sf = example(3)
    sampler = Sampler(sf.field.with_momenta(), seed=7)
    for _ in range(5):
        pt = sampler.draw()
        x1, x2, p1, p2, b, c = (pt[k] for k in ("x1", "x2", "p1", "p2", "b", "c"))
        direct = ((x1 * p2 - x2 * p1) ** 2 + 4 * b * x1**2 * x2**2 / (x1**2 - x2**2) ** 2
                  + c * (x1**4 + x2**4) / (x1**2 * x2**2))
        assert eval_at(sf.symmetries["K2"], pt) == pytest.approx(direct, rel=1e-12)


def test_transformed_hamiltonian_identity(example):
    """Hhat U + E - (p1^2 + p2^2) vanishes at random points."""
    sf = example(2)
    Hhat = as_phase(sf.expected_object("Hhat"))
    f = Hhat.field
    expr = Hhat * f.lift(sf.U) + f.param("E") - as_phase(sf.parse("p1^2 + p2^2"), f)
    assert not expr
    assert max_abs_at_random(Hhat * f.lift(sf.U) + f.param("E"), points=10) > 0
    sampler = Sampler(f, seed=3)
    for _ in range(10):
        pt = sampler.draw([Hhat])
        lhs = eval_at(Hhat, pt) * eval_at(sf.U, pt) + pt["E"]
        assert lhs == pytest.approx(pt["p1"] ** 2 + pt["p2"] ** 2, rel=1e-12)


def test_singular_point_rejected():
    f = FunctionField(("x1", "x2"))
    s = parse_expression("1/(x1 - x2) + sqrt(x1)", f, "scalar")
    with pytest.raises(SingularPointError):
        eval_at(s, {"x1": 1.0, "x2": 1.0})
    with pytest.raises(SingularPointError):
        eval_at(s, {"x1": -1.0, "x2": 2.0})


def test_fd_canonical_pair():
    f = FunctionField(("x1", "x2")).with_momenta()
    rep = fd_bracket_check(f.coord(0), f.momentum(0))
    assert rep.max_deviation < 1e-10
    assert rep.symbolic == pytest.approx([1.0] * rep.points)


def test_fd_fourth_order_pairs(example):
    sf = example(3)
    H, K2, K4 = sf.hamiltonian, sf.symmetries["K2"], sf.symmetries["K4"]
    for f, g in ((H, K2), (H, K4), (K2, K4)):
        assert fd_bracket_check(f, g, points=5).max_deviation < 1e-6


def test_fd_nonzero_bracket(example):
    """{H, p1} is nonzero; symbolic and finite-difference values agree."""
    sf = example(1)
    p1 = sf.parse("p1")
    rep = fd_bracket_check(sf.hamiltonian, p1)
    assert rep.max_deviation < 1e-6
    assert min(abs(v) for v in rep.symbolic) > 1e-3


@pytest.fixture(scope="module")
def square_root_flow(example):
    sf = example(1)
    num = sf.numeric
    return sf, lambda tol: flow_conserve(
        sf.hamiltonian, {"H": sf.hamiltonian, "K2": sf.symmetries["K2"], "K3": sf.symmetries["K3"]},
        num["x0"], num["p0"], num["params"], T=10.0, tol=tol)


def test_flow_conserves_square_root_symmetries(square_root_flow):
    _, run = square_root_flow
    rep = run(1e-10)
    assert not rep.truncated and rep.t_end == 10.0
    assert rep.max_drift < 1e-6
    assert rep.drifts["H"] < 1e-8


def test_flow_drift_scales_with_tolerance(square_root_flow):
    """Halving tol does not raise the drift tenfold (regression guard)."""
    _, run = square_root_flow
    a, b = run(1e-9).max_drift, run(5e-10).max_drift
    assert b <= 10 * a + 1e-12


def test_flow_transformed_system(example):
    sf = example(2)
    num = sf.numeric
    objs = {k: sf.expected_object(k) for k in ("Hhat", "Khat2", "Khat3")}
    rep = flow_conserve(objs["Hhat"], objs, num["x0"], num["p0"], num["params"], T=10.0, tol=1e-10)
    assert not rep.truncated and rep.max_drift < 1e-6


def test_flow_truncates_at_singular_locus():
    """p1 = -1 drives x1 to zero, where sqrt(x1) stops being regular."""
    f = FunctionField(("x1", "x2"), ("b",))
    H = parse_expression("p1^2 + p2^2 + b*sqrt(x1)", f, "classical")
    rep = flow_conserve(H, [H], [0.5, 1.0], [-1.0, 0.0], {"b": 0.1}, T=10.0, tol=1e-10)
    assert rep.truncated and rep.t_end < 10.0


def _table(example):
    sf = example(3)
    funcs = []
    for name in ("H", "K2", "K4"):
        s = as_phase(sf.bindings()[name])
        funcs.extend(s.diff(i) for i in range(s.field.n))
    table = CompiledFunctions(funcs)
    sampler = Sampler(table.field, seed=11)
    pts = [table.arrays(sampler.draw()) for _ in range(50)]
    xs = np.ascontiguousarray(np.vstack([p[0] for p in pts]))
    roots = np.ascontiguousarray(np.vstack([p[1] for p in pts]))
    return table, xs, roots


@pytest.mark.skipif(_ckernels is None, reason="compiled kernel not built")
def test_kernel_parity(example):
    """The compiled and numpy evaluators agree to rounding."""
    table, xs, roots = _table(example)
    args = (table.coeffs, table.exps, table.bounds, table.field.n, xs, roots)
    v_py, m_py = _pykernels.eval_table(*args)
    v_c, m_c = _ckernels.eval_table(*args)
    assert np.all(np.abs(v_py - v_c) <= 1e-12 * np.maximum(m_py, 1.0))
    assert np.allclose(m_py, m_c, rtol=1e-12)


def test_surd_evaluation():
    """Odd half-powers of coordinates go through the roots array."""
    f = FunctionField(("x1", "x2"))
    s = parse_expression("x1^(3/2) + sqrt(x2)*x1 - x2^(5/2)", f, "scalar")
    x1, x2 = 1.7, 0.6
    assert eval_at(s, {"x1": x1, "x2": x2}) == pytest.approx(
        x1**1.5 + math.sqrt(x2) * x1 - x2**2.5, rel=1e-14)


def test_kernel_selection():
    code = "from stackel.numeric import KERNEL; print(KERNEL)"
    env = dict(os.environ, STACKEL_NUMERIC="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.strip()
    assert out == "python"
    assert KERNEL in ("cython", "python")
