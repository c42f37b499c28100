"""Structure relations of symmetry algebras: exact verification and fitting.

A relation is a pair of expressions over named generators (``H``, ``K2``,
``R`` ...) in the parser language.  In classical mode braces are Poisson
brackets; in quantum mode ``[A,B]`` is the commutator and ``{A,B}`` the
anticommutator.

Grading uses a weight: momentum (or derivative) degree plus twice the
degree in the graded parameters.  A bracket lowers weight by one.  Classical
relations must be homogeneous; quantum relations may carry lower-weight
reordering corrections, so there the weight is only an upper bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import _backend
from .errors import GradingError, UsageError
from .operators import DifferentialOperator
from .parser import Environment, evaluate, parse, weight
from .phase import MomentumPolynomial
from .scalar import FunctionField, Scalar

__all__ = [
    "RelationSpec",
    "RelationReport",
    "FitResult",
    "generator_weight",
    "verify_relation",
    "fit_relation",
    "ambiguity_readings",
]

B = _backend.backend


@dataclass
class RelationSpec:
    """``left = right`` over named generators."""

    name: str
    left: str
    right: str
    quantum: bool = False

    @property
    def mode(self) -> str:
        return "quantum" if self.quantum else "classical"

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass
class RelationReport:
    name: str
    residual: object
    left_weight: frozenset
    right_weight: frozenset

    @property
    def verdict(self) -> bool:
        return not self.residual

    @property
    def support(self) -> list[tuple[int, ...]]:
        """Momentum or derivative multi-indices where the residual survives."""
        terms = getattr(self.residual, "terms", None)
        if terms is None:
            return [] if not self.residual else [()]
        return sorted(terms, key=lambda m: (-sum(m), m))


def _terms(obj) -> dict:
    if isinstance(obj, (MomentumPolynomial, DifferentialOperator)):
        return obj.terms
    if isinstance(obj, Scalar):
        if obj.field.momenta:
            return MomentumPolynomial.from_phase(obj).terms
        return {(): obj} if obj else {}
    raise UsageError(f"cannot grade {type(obj).__name__}")


def generator_weight(obj, params: Iterable[str]) -> int:
    """Largest ``momentum degree + 2 * parameter degree`` over the terms of ``obj``."""
    params = tuple(params)
    best = None
    for m, c in _terms(obj).items():
        w = sum(m) + 2 * c.max_degree_in(params)
        best = w if best is None else max(best, w)
    return 0 if best is None else best


def _field_of(bindings: Mapping[str, object], field: FunctionField | None) -> FunctionField:
    f = field
    for v in bindings.values():
        g = v.field
        g = g.without_momenta() if g.momenta else g
        f = g if f is None else f.union(g)
    if f is None:
        raise UsageError("no generators bound and no field given")
    return f


def _weights(bindings, params, weights):
    out = {p: 2 for p in params}
    for name, obj in bindings.items():
        out[name] = generator_weight(obj, params)
    out.update(weights or {})
    return out


def _check_grading(name, lw, rw, quantum):
    if quantum:
        if max(rw) > max(lw):
            raise GradingError(f"{name}: right side weight {max(rw)} exceeds left side weight {max(lw)}")
        return
    if len(lw) != 1 or lw != rw:
        raise GradingError(f"{name}: weights differ (left {sorted(lw)}, right {sorted(rw)})")


def verify_relation(rel: RelationSpec, bindings: Mapping[str, object], params: Sequence[str] = (),
                    weights: Mapping[str, int] | None = None,
                    field: FunctionField | None = None) -> RelationReport:
    """Expand both sides and return the exact residual ``left - right``.

    ``params`` are the graded parameters (weight 2 each).  The grading is
    checked before anything is expanded.
    """
    f = _field_of(bindings, field)
    ln, rn = parse(rel.left), parse(rel.right)
    wmap = _weights(bindings, params, weights)
    for p in f.params:
        wmap.setdefault(p, 0)
    lw, rw = weight(ln, wmap, rel.mode), weight(rn, wmap, rel.mode)
    _check_grading(rel.name, lw, rw, rel.quantum)
    env = Environment(f, rel.mode, dict(bindings))
    residual = _sub(evaluate(ln, env), evaluate(rn, env))
    return RelationReport(rel.name, residual, lw, rw)


def _sub(a, b):
    if isinstance(a, Scalar) and not isinstance(b, Scalar):
        return -(b - a)
    return a - b


# -- exact fitting -------------------------------------------------------------

@dataclass
class FitResult:
    """Solution of ``left = sum_k c_k basis_k`` with parameter-polynomial ``c_k``."""

    left: str
    basis: list[str]
    coefficients: dict[str, Scalar]
    feasible: bool
    nullity: int = 0
    family: list[dict[str, Scalar]] = dc_field(default_factory=list)
    unmatched: list[tuple[int, ...]] = dc_field(default_factory=list)
    quantum: bool = False

    def relation(self, name: str = "fitted") -> RelationSpec:
        parts = []
        for b in self.basis:
            c = self.coefficients.get(b)
            if c is None or not c:
                continue
            parts.append(f"({c})*({b})")
        return RelationSpec(name, self.left, " + ".join(parts) or "0", self.quantum)


def _param_monomials(params: Sequence[str], degree: int):
    return list(itertools.combinations_with_replacement(params, degree))


def _lcm(a, b):
    g = B.gcd(a, b)
    return B.exquo(a, g) * b


def _rows_for_index(scalars: list[Scalar], ncols: int, target: Scalar):
    """Linear equations from one multi-index: coefficients over a common denominator."""
    dens = [s.den for s in scalars if s] + ([target.den] if target else [])
    if not dens:
        return []
    D = dens[0]
    for d in dens[1:]:
        if d != D:
            D = _lcm(D, d)
    table: dict[tuple, list] = {}
    entries = list(enumerate(scalars)) + [(ncols, target)]
    for col, s in entries:
        if not s:
            continue
        num = s.num * B.exquo(D, s.den)
        for exps, c in B.terms(num):
            row = table.get(exps)
            if row is None:
                row = table[exps] = [Fraction(0)] * (ncols + 1)
            row[col] += c
    return list(table.values())


def _solve(rows, ncols):
    """Reduced echelon form of the augmented system; None when inconsistent."""
    if not rows:
        return [], []
    red, pivots = B.rref(rows, ncols + 1)
    if ncols in pivots:
        return None
    return red, pivots


def fit_relation(left: str, basis: Sequence[str], bindings: Mapping[str, object],
                 params: Sequence[str] = (), quantum: bool = False,
                 weights: Mapping[str, int] | None = None,
                 field: FunctionField | None = None) -> FitResult:
    """Find parameter-polynomial coefficients with ``left = sum_k c_k basis_k`` exactly.

    Each ``c_k`` ranges over polynomials in ``params`` allowed by the
    grading.  The linear system is solved over Q; when it is inconsistent
    the multi-indices that cannot be matched are reported.
    """
    f = _field_of(bindings, field)
    mode = "quantum" if quantum else "classical"
    env = Environment(f, mode, dict(bindings))
    wmap = _weights(bindings, params, weights)
    for p in f.params:
        wmap.setdefault(p, 0)
    ln = parse(left)
    lw = max(weight(ln, wmap, mode))
    L = _lift_constant(evaluate(ln, env), quantum)
    columns: list[tuple[int, tuple[str, ...]]] = []
    objects = []
    for k, text in enumerate(basis):
        node = parse(text)
        bw = max(weight(node, wmap, mode))
        gap = lw - bw
        if gap < 0 or (not quantum and gap % 2):
            raise GradingError(f"basis element {text!r} has weight {bw}, incompatible with {lw}")
        obj = _lift_constant(evaluate(node, env), quantum)
        degrees = range(gap // 2 + 1) if quantum else [gap // 2]
        for d in degrees:
            for mono in _param_monomials(params, d):
                coef = f.one
                for p in mono:
                    coef = coef * f.param(p)
                columns.append((k, mono))
                objects.append(_scale(obj, coef))
    ncols = len(columns)
    Lt = _terms(L)
    col_terms = [_terms(o) for o in objects]
    indices = set(Lt)
    for t in col_terms:
        indices |= set(t)
    order = sorted(indices, key=lambda m: (-sum(m), m))
    blocks = {}
    for m in order:
        blocks[m] = _rows_for_index([t.get(m, f.zero) for t in col_terms], ncols, Lt.get(m, f.zero))
    rows = [r for m in order for r in blocks[m]]
    sol = _solve(rows, ncols)
    unmatched = []
    if sol is None:
        kept = []
        for m in order:
            trial = kept + blocks[m]
            if _solve(trial, ncols) is None:
                unmatched.append(m)
            else:
                kept = trial
        sol = _solve(kept, ncols)
    red, pivots = sol
    values = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        values[p] = row[ncols]
    free = [j for j in range(ncols) if j not in pivots]

    def collect(vec):
        out: dict[str, Scalar] = {}
        for (k, mono), v in zip(columns, vec):
            if not v:
                continue
            term = f(v)
            for p in mono:
                term = term * f.param(p)
            out[basis[k]] = out.get(basis[k], f.zero) + term
        return out

    family = []
    for j in free:
        vec = [Fraction(0)] * ncols
        vec[j] = Fraction(1)
        for row, p in zip(red, pivots):
            vec[p] = -row[j]
        family.append(collect(vec))
    return FitResult(left, list(basis), collect(values), not unmatched, len(free), family,
                     unmatched, quantum)


def _lift_constant(obj, quantum: bool):
    if isinstance(obj, Scalar) and not obj.field.momenta:
        if quantum:
            return DifferentialOperator.multiplication(obj)
        return MomentumPolynomial.constant(obj, obj.field)
    return obj


def _scale(obj, s: Scalar):
    if isinstance(obj, (MomentumPolynomial, DifferentialOperator)):
        return obj.scale(s)
    return obj * s


def ambiguity_readings(rel: RelationSpec, symbol: str, candidates: Sequence[str],
                       bindings: Mapping[str, object], params: Sequence[str] = (),
                       weights: Mapping[str, int] | None = None) -> list[tuple[str, RelationReport | None, str]]:
    """Verify ``rel`` with the undefined ``symbol`` read as each candidate generator.

    Returns ``(candidate, report or None, note)``; a reading that breaks the
    grading is reported with ``None`` and the grading message.
    """
    out = []
    for cand in candidates:
        b = dict(bindings)
        b[symbol] = bindings[cand]
        try:
            out.append((cand, verify_relation(rel, b, params, weights), ""))
        except GradingError as exc:
            out.append((cand, None, str(exc)))
    return out
