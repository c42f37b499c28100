"""Linear differential operators with rational coefficients.

Operators are kept in normal form ``sum_a c_a(x) d^a``: every coefficient
stands to the left of a pure derivative monomial.  A function used as an
operator means left multiplication.  The quantum Staeckel transforms for
two-dimensional systems are built on top of this.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import DecompositionError, DegenerateInputError, NotASymmetryError, UsageError
from .phase import MomentumPolynomial
from .scalar import FunctionField, Scalar, as_scalar

__all__ = [
    "DifferentialOperator",
    "AlphaOperatorFamily",
    "compose",
    "commutator",
    "anticommutator",
    "formal_adjoint",
    "hamiltonian_operator",
    "self_adjoint_2nd_form",
    "first_order_skew_form",
    "quantize_2nd",
    "build_separable_system",
    "quantum_stackel_2nd",
    "stackel_2nd_divergence_form",
    "alpha_decompose",
    "quantum_stackel_N",
    "telescoping_identity",
    "principal_symbol",
    "TelescopeReport",
]


def _key(m):
    return (-sum(m), tuple(-e for e in m))


def _sub_indices(alpha):
    return itertools.product(*(range(k + 1) for k in alpha))


def _multinomial(alpha, gamma):
    out = 1
    for a, g in zip(alpha, gamma):
        out *= comb(a, g)
    return out


class DifferentialOperator:
    """``sum c_a d^a`` with :class:`Scalar` coefficients, in normal form."""

    __slots__ = ("field", "terms", "_hash")

    def __init__(self, field: FunctionField, terms: Mapping[tuple[int, ...], object] | None = None):
        if field.momenta:
            field = field.without_momenta()
        self.field = field
        clean = {}
        for m, c in (terms or {}).items():
            if len(m) != field.n:
                raise UsageError(f"derivative multi-index {m} does not match n={field.n}")
            c = as_scalar(c, field)
            if c:
                clean[tuple(m)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, field, terms):
        obj = object.__new__(cls)
        obj.field, obj.terms, obj._hash = field, terms, None
        return obj

    # -- construction -----------------------------------------------------

    @classmethod
    def multiplication(cls, s, field: FunctionField | None = None) -> "DifferentialOperator":
        if not isinstance(s, Scalar):
            if field is None:
                raise UsageError("field required for a numeric multiplier")
            s = field(s)
        f = s.field.without_momenta() if s.field.momenta else s.field
        return cls._raw(f, {(0,) * f.n: f.lift(s)} if s else {})

    @classmethod
    def derivative(cls, multi: Sequence[int], field: FunctionField) -> "DifferentialOperator":
        f = field.without_momenta() if field.momenta else field
        return cls._raw(f, {tuple(multi): f.one})

    @classmethod
    def partial(cls, *indices: int, field: FunctionField) -> "DifferentialOperator":
        """``d_{i j ...}`` from 0-based coordinate indices."""
        m = [0] * field.n
        for i in indices:
            m[i] += 1
        return cls.derivative(m, field)

    @classmethod
    def zero(cls, field: FunctionField) -> "DifferentialOperator":
        return cls._raw(field.without_momenta() if field.momenta else field, {})

    @classmethod
    def identity(cls, field: FunctionField) -> "DifferentialOperator":
        return cls.multiplication(field.one if not field.momenta else field.without_momenta().one)

    # -- properties -------------------------------------------------------

    @property
    def n(self) -> int:
        return self.field.n

    def order(self) -> int:
        """Highest derivative order; -1 for the zero operator."""
        return max((sum(m) for m in self.terms), default=-1)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_multiplication(self) -> bool:
        return all(not any(m) for m in self.terms)

    def coefficient(self, m: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(m), self.field.zero)

    def homogeneous_part(self, k: int) -> "DifferentialOperator":
        return DifferentialOperator._raw(self.field, {m: c for m, c in self.terms.items() if sum(m) == k})

    def free_symbols(self) -> set[str]:
        out = set()
        for c in self.terms.values():
            out |= c.free_symbols()
        return out

    # -- fields -----------------------------------------------------------

    def lift(self, field: FunctionField) -> "DifferentialOperator":
        if field.momenta:
            field = field.without_momenta()
        if field is self.field:
            return self
        return DifferentialOperator._raw(field, {m: field.lift(c) for m, c in self.terms.items()})

    def _coerce(self, other):
        if isinstance(other, DifferentialOperator):
            if other.field is self.field:
                return self, other
            f = self.field.union(other.field)
            return self.lift(f), other.lift(f)
        if isinstance(other, Scalar):
            f = self.field.union(other.field.without_momenta() if other.field.momenta else other.field)
            return self.lift(f), DifferentialOperator.multiplication(f.lift(other))
        try:
            return self, DifferentialOperator.multiplication(self.field(other))
        except (TypeError, ValueError):
            return NotImplemented, NotImplemented

    # -- linear structure -------------------------------------------------

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        terms = dict(a.terms)
        for m, c in b.terms.items():
            s = terms.get(m)
            s = c if s is None else s + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return DifferentialOperator._raw(a.field, terms)

    __radd__ = __add__

    def __neg__(self):
        return DifferentialOperator._raw(self.field, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return b + (-a)

    def scale(self, s) -> "DifferentialOperator":
        """Left multiplication by the function ``s``."""
        if not isinstance(s, Scalar):
            s = self.field(s)
        a, m = self._coerce(s)
        s = m.coefficient((0,) * a.n)
        if not s:
            return DifferentialOperator._raw(a.field, {})
        return DifferentialOperator._raw(a.field, {k: c * s for k, c in a.terms.items()})

    # -- products ---------------------------------------------------------

    def __mul__(self, other):
        """Composition ``self o other`` (numbers and scalars act as multipliers)."""
        if isinstance(other, (int,)) or (not isinstance(other, (Scalar, DifferentialOperator))
                                          and hasattr(other, "denominator")):
            return self.scale(self.field(other))
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return compose(a, b)

    def __rmul__(self, other):
        # other * self with other a scalar or number: left multiplication
        if isinstance(other, Scalar):
            return self.scale(other)
        return self.scale(self.field(other))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise UsageError("operators support non-negative integer powers only")
        out = DifferentialOperator.identity(self.field)
        for _ in range(k):
            out = compose(out, self)
        return out

    def __truediv__(self, other):
        """``A / s`` is left multiplication by ``1/s`` for a function ``s``."""
        if isinstance(other, DifferentialOperator):
            if not other.is_multiplication():
                raise UsageError("can only divide by a function")
            other = other.coefficient((0,) * other.n)
        s = other if isinstance(other, Scalar) else self.field(other)
        if not s:
            raise DegenerateInputError("division by zero function")
        return self.scale(s.inverse())

    def __eq__(self, other):
        if isinstance(other, (DifferentialOperator, Scalar, int)):
            a, b = self._coerce(other)
            if a is NotImplemented:
                return NotImplemented
            return a.terms == b.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- action, substitution ---------------------------------------------

    def apply(self, f: Scalar) -> Scalar:
        """Apply to a function."""
        g = self.field.union(f.field)
        f = g.lift(f)
        total = g.zero
        for m, c in self.terms.items():
            d = f.diff_multi(m)
            if d:
                total = total + g.lift(c) * d
        return total

    def subs(self, bindings: Mapping[str, object]) -> "DifferentialOperator":
        out = None
        for m, c in self.terms.items():
            v = c.subs(bindings)
            term = DifferentialOperator._raw(v.field, {m: v} if v else {})
            out = term if out is None else out + term
        return out if out is not None else DifferentialOperator.zero(self.field)

    def map_coefficients(self, fn) -> "DifferentialOperator":
        out = DifferentialOperator.zero(self.field)
        for m, c in self.terms.items():
            v = fn(c)
            out = out + DifferentialOperator._raw(v.field, {m: v} if v else {})
        return out

    # -- printing ---------------------------------------------------------

    @staticmethod
    def token(m: Sequence[int]) -> str:
        return "d" + "".join(str(i + 1) * k for i, k in enumerate(m))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m in sorted(self.terms, key=_key):
            cs = str(self.terms[m])
            sign = "+"
            if cs.startswith("-") and " " not in cs:
                sign, cs = "-", cs[1:]
            if not any(m):
                body = cs if " " not in cs else f"({cs})"
            elif cs == "1":
                body = self.token(m)
            else:
                body = (cs if " " not in cs and "/" not in cs else f"({cs})") + "*" + self.token(m)
            pieces.append((sign, body))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"DifferentialOperator({str(self)!r})"


def compose(A: DifferentialOperator, B: DifferentialOperator) -> DifferentialOperator:
    """Normal-ordered ``A o B`` by the generalized Leibniz rule.

    ``a d^al o b d^be = sum_{ga <= al} C(al, ga) a (d^ga b) d^(al - ga + be)``.
    """
    A, B = A._coerce(B)
    n = A.n
    acc: dict[tuple, list] = {}
    for al, a in A.terms.items():
        subs = list(_sub_indices(al))
        for be, b in B.terms.items():
            for ga in subs:
                db = b.diff_multi(ga)
                if not db:
                    continue
                k = _multinomial(al, ga)
                idx = tuple(al[i] - ga[i] + be[i] for i in range(n))
                term = a * db
                if k != 1:
                    term = term * k
                acc.setdefault(idx, []).append(term)
    terms = {}
    for idx, parts in acc.items():
        s = _sum(parts)
        if s:
            terms[idx] = s
    return DifferentialOperator._raw(A.field, terms)


def _sum(parts: list[Scalar]) -> Scalar:
    # pairwise summation keeps intermediate denominators small
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def commutator(A: DifferentialOperator, B: DifferentialOperator) -> DifferentialOperator:
    return compose(A, B) - compose(B, A)


def anticommutator(A: DifferentialOperator, B: DifferentialOperator) -> DifferentialOperator:
    return compose(A, B) + compose(B, A)


def formal_adjoint(T: DifferentialOperator, lam=1) -> DifferentialOperator:
    """Adjoint for ``<f, g> = int f g lam dx``: ``(c d^a)* = (-1)^|a| lam^-1 d^a o (lam c)``."""
    lam = lam if isinstance(lam, Scalar) else T.field(lam)
    f = T.field.union(lam.field)
    T = T.lift(f)
    lam = f.lift(lam)
    if not lam:
        raise DegenerateInputError("weight is zero")
    inv = lam.inverse()
    out = DifferentialOperator.zero(f)
    for m, c in T.terms.items():
        term = compose(DifferentialOperator.derivative(m, f), DifferentialOperator.multiplication(lam * c))
        term = term.scale(inv)
        out = out + (term if sum(m) % 2 == 0 else -term)
    return out


def hamiltonian_operator(lam, V, field: FunctionField | None = None) -> DifferentialOperator:
    """``lam^-1 (d11 + d22 + ...) + V``."""
    lam = lam if isinstance(lam, Scalar) else field(lam)
    V = V if isinstance(V, Scalar) else lam.field(V)
    f = lam.field.union(V.field)
    lap = DifferentialOperator.zero(f)
    for i in range(f.n):
        lap = lap + DifferentialOperator.partial(i, i, field=f)
    return lap.scale(f.lift(lam).inverse()) + f.lift(V)


def self_adjoint_2nd_form(a: Sequence[Sequence], W, lam) -> DifferentialOperator:
    """``lam^-1 sum_kj d_k o (lam a^kj) o d_j + W``."""
    lam = lam if isinstance(lam, Scalar) else as_scalar(lam, a[0][0].field)
    f = lam.field
    for row in a:
        for v in row:
            if isinstance(v, Scalar):
                f = f.union(v.field)
    if isinstance(W, Scalar):
        f = f.union(W.field)
    lam = f.lift(lam)
    n = f.n
    A = [[as_scalar(v, f) for v in row] for row in a]
    for k in range(n):
        for j in range(n):
            if A[k][j] != A[j][k]:
                raise UsageError("coefficient matrix must be symmetric")
    out = DifferentialOperator.zero(f)
    for k in range(n):
        for j in range(n):
            if not A[k][j]:
                continue
            mid = DifferentialOperator.multiplication(lam * A[k][j])
            term = compose(compose(DifferentialOperator.partial(k, field=f), mid),
                           DifferentialOperator.partial(j, field=f))
            out = out + term
    return out.scale(lam.inverse()) + as_scalar(W, f)


def first_order_skew_form(a: Sequence, lam) -> DifferentialOperator:
    """``sum_k (a^k d_k + d_k(lam a^k) / (2 lam))``."""
    lam = lam if isinstance(lam, Scalar) else as_scalar(lam, a[0].field)
    f = lam.field
    for v in a:
        if isinstance(v, Scalar):
            f = f.union(v.field)
    lam = f.lift(lam)
    out = DifferentialOperator.zero(f)
    for k, ak in enumerate(a):
        ak = as_scalar(ak, f)
        out = out + DifferentialOperator.partial(k, field=f).scale(ak)
        out = out + (lam * ak).diff(k) / (lam * 2)
    return out


def _second_order_data(K: MomentumPolynomial):
    if K.degrees() - {0, 2}:
        raise UsageError("expected a polynomial K2 + K0")
    n, f = K.n, K.field
    a = [[f.zero] * n for _ in range(n)]
    for m, c in K.terms.items():
        if sum(m) != 2:
            continue
        idx = [i for i, k in enumerate(m) for _ in range(k)]
        i, j = idx
        if i == j:
            a[i][i] = c
        else:
            a[i][j] = a[j][i] = c / 2
    return a, K.coefficient((0,) * n)


def quantize_2nd(K: MomentumPolynomial, lam) -> DifferentialOperator:
    """Self-adjoint operator attached to a classical ``sum a^kj p_k p_j + W``."""
    a, W = _second_order_data(K)
    return self_adjoint_2nd_form(a, W, lam)


def build_separable_system(X1, X2, V1, V2):
    """``H`` and the separation symmetry ``K`` for a Liouville-type metric ``X1 + X2``."""
    f = X1.field
    for s in (X2, V1, V2):
        f = f.union(s.field)
    X1, X2, V1, V2 = (f.lift(s) for s in (X1, X2, V1, V2))
    if X1.depends_on(f.coords[1]) or V1.depends_on(f.coords[1]) \
            or X2.depends_on(f.coords[0]) or V2.depends_on(f.coords[0]):
        raise UsageError("X1, V1 must depend on x1 only and X2, V2 on x2 only")
    lam = X1 + X2
    if not lam:
        raise DegenerateInputError("X1 + X2 vanishes")
    inv = lam.inverse()
    d11 = DifferentialOperator.partial(0, 0, field=f)
    d22 = DifferentialOperator.partial(1, 1, field=f)
    H = (d11 + d22 + V1 + V2).scale(inv)
    K = (d11.scale(X2) - d22.scale(X1) + (X2 * V1 - X1 * V2)).scale(inv)
    r = commutator(H, K)
    if r:
        raise NotASymmetryError("separable pair fails to commute", r)
    return H, K


def quantum_stackel_2nd(K: DifferentialOperator, H: DifferentialOperator, U, K0U,
                        lam=None, verify: bool = True) -> DifferentialOperator:
    """``K~ = K - K0^U U^-1 H``; a symmetry of ``U^-1 H``."""
    f = K.field.union(H.field)
    U, K0U = (s if isinstance(s, Scalar) else f(s) for s in (U, K0U))
    f = f.union(U.field).union(K0U.field)
    K, H, U, K0U = K.lift(f), H.lift(f), f.lift(U), f.lift(K0U)
    if not U:
        raise DegenerateInputError("U is identically zero")
    if verify:
        r = commutator(H, K)
        if r:
            raise NotASymmetryError("K does not commute with H", r)
    out = K - H.scale(K0U / U)
    if verify:
        r = commutator(H.scale(U.inverse()), out)
        if r:
            raise NotASymmetryError("transformed operator fails to commute with U^-1 H", r)
        if lam is not None:
            w = f.lift(lam) * U
            if formal_adjoint(out, w) != out:
                raise NotASymmetryError("transformed operator is not self-adjoint for weight U*lam")
    return out


def stackel_2nd_divergence_form(a, W, lam, V, U, WU) -> DifferentialOperator:
    """``sum (U lam)^-1 d_i o ((a^ij - delta^ij W_U/(U lam)) U lam) o d_j + (W - W_U V/U)``."""
    f = lam.field
    for s in (W, V, U, WU):
        f = f.union(s.field)
    for row in a:
        for v in row:
            f = f.union(v.field)
    lam, W, V, U, WU = (f.lift(s) for s in (lam, W, V, U, WU))
    Ul = U * lam
    out = DifferentialOperator.zero(f)
    n = f.n
    for i in range(n):
        for j in range(n):
            coef = f.lift(a[i][j]) - (WU / Ul if i == j else f.zero)
            if not coef:
                continue
            mid = DifferentialOperator.multiplication(coef * Ul)
            out = out + compose(compose(DifferentialOperator.partial(i, field=f), mid),
                                DifferentialOperator.partial(j, field=f))
    return out.scale(Ul.inverse()) + (W - WU * V / U)


# -- alpha families and the Nth-order transform --------------------------------

@dataclass
class AlphaOperatorFamily:
    """``K(alpha) = sum_j alpha^j K_{N-2j}`` with the data it was checked against."""

    parts: list
    order: int
    H: DifferentialOperator
    U: Scalar
    alpha: str = "alpha"
    order_violations: list = dc_field(default_factory=list)

    def part(self, j: int) -> DifferentialOperator:
        if 0 <= j < len(self.parts):
            return self.parts[j]
        return DifferentialOperator.zero(self.H.field)

    def total(self) -> DifferentialOperator:
        f = self.H.field.with_params(self.alpha)
        a = f.param(self.alpha)
        out = DifferentialOperator.zero(f)
        for j, p in enumerate(self.parts):
            out = out + p.lift(f).scale(a ** j)
        return out

    def identity_residuals(self) -> list[tuple[int, DifferentialOperator]]:
        """``[K_{N-2j}, U] + [K_{N-2j-2}, H]`` for ``j = -1 .. [N/2]``."""
        Uop = DifferentialOperator.multiplication(self.U)
        out = []
        for j in range(-1, self.order // 2 + 1):
            r = commutator(self.part(j), Uop) + commutator(self.part(j + 1), self.H)
            out.append((j, r))
        return out


def _split_alpha(K: DifferentialOperator, alpha: str) -> dict[int, DifferentialOperator]:
    by_power: dict[int, DifferentialOperator] = {}
    for m, c in K.terms.items():
        for k, ck in c.coefficients_in(alpha).items():
            if not ck:
                continue
            base = ck.field
            op = DifferentialOperator._raw(base, {m: ck})
            by_power[k] = by_power[k] + op if k in by_power else op
    return by_power


def _as_multiple(part: DifferentialOperator, L: DifferentialOperator):
    """Return ``c`` (coordinate-free) with ``part = c L``, or None."""
    part, L = part._coerce(L)
    if not L or set(part.terms) != set(L.terms):
        return None
    ratio = None
    for m, c in part.terms.items():
        r = c / L.terms[m]
        if not r.is_coordinate_free():
            return None
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
    return ratio


def alpha_decompose(K_alpha: DifferentialOperator, order: int, H: DifferentialOperator, U,
                    alpha: str = "alpha", ambiguities: Iterable[DifferentialOperator] = (),
                    verify: bool = True, strict_order: bool = True) -> AlphaOperatorFamily:
    """Split ``K(alpha)`` by powers of ``alpha`` and check the graded identities.

    ``H`` is the alpha-free Hamiltonian (so the family commutes with
    ``H + alpha U``).  Powers above ``[N/2]`` are removed when they are
    coordinate-free multiples of a declared alpha-independent symmetry.
    A part ``K_{N-2j}`` of order above ``N - 2j`` is an error unless
    ``strict_order`` is false, in which case it is recorded as
    ``(j, actual order)`` in ``order_violations``.
    """
    U = U if isinstance(U, Scalar) else K_alpha.field(U)
    f = K_alpha.field.union(H.field).union(U.field)
    by_power = _split_alpha(K_alpha.lift(f), alpha)
    top = order // 2
    for k in sorted(by_power):
        if k <= top:
            continue
        fixed = False
        for L in ambiguities:
            if _as_multiple(by_power[k], L) is not None:
                fixed = True
                break
        if not fixed:
            raise DecompositionError(f"alpha-degree {k} exceeds {top} and is not an ambiguity term",
                                     grade=k, residual=by_power[k])
        del by_power[k]
    base = f.without_momenta()
    parts, violations = [], []
    for j in range(top + 1):
        p = by_power.get(j, DifferentialOperator.zero(base))
        if p.order() > order - 2 * j:
            if strict_order:
                raise DecompositionError(f"part {j} has order {p.order()} > {order - 2 * j}",
                                         grade=j, residual=p)
            violations.append((j, p.order()))
        parts.append(p.lift(base))
    fam = AlphaOperatorFamily(parts, order, H.lift(base), base.lift(U), alpha, violations)
    if verify:
        for j, r in fam.identity_residuals():
            if r:
                raise DecompositionError(f"identity fails at j={j}", grade=j, residual=r)
    return fam


def _shifted_hamiltonian(fam: AlphaOperatorFamily, shift) -> DifferentialOperator:
    f = fam.H.field
    if isinstance(shift, str):
        f = f.with_params(shift)
        shift = f.param(shift)
    shift = shift if isinstance(shift, Scalar) else f(shift)
    f = f.union(shift.field)
    return (fam.H.lift(f) + f.lift(shift)).scale(f.lift(fam.U).inverse())


def quantum_stackel_N(fam: AlphaOperatorFamily, shift="b", verify: bool = True) -> DifferentialOperator:
    """``K~ = sum_h (-1)^h K_{N-2h} (U^-1 (H + b))^h``; a symmetry of ``U^-1 (H + b)``."""
    Ht = _shifted_hamiltonian(fam, shift)
    f = Ht.field
    out = DifferentialOperator.zero(f)
    power = DifferentialOperator.identity(f)
    for h, part in enumerate(fam.parts):
        if h:
            power = compose(power, Ht)
        term = compose(part.lift(f), power)
        out = out + (term if h % 2 == 0 else -term)
    if verify:
        r = commutator(out, Ht)
        if r:
            raise NotASymmetryError("transformed operator fails to commute with U^-1 (H + b)", r)
    return out


@dataclass
class TelescopeReport:
    lhs: DifferentialOperator
    rhs: DifferentialOperator
    grade_terms: list

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs and not self.lhs and all(not t for _, t in self.grade_terms)


def telescoping_identity(fam: AlphaOperatorFamily, shift="b") -> TelescopeReport:
    """Both sides of the commutator telescoping used to prove the Nth-order transform.

    ``[K~, Ht] = U^-1 sum_h (-1)^h ([K_{N-2h+2}, U] + [K_{N-2h}, H]) Ht^h``
    with ``Ht = U^-1 (H + b)``; the left side is computed directly.
    """
    Ht = _shifted_hamiltonian(fam, shift)
    f = Ht.field
    Kt = quantum_stackel_N(fam, shift, verify=False)
    lhs = commutator(Kt, Ht)
    Uop = DifferentialOperator.multiplication(f.lift(fam.U))
    H = fam.H.lift(f)
    rhs = DifferentialOperator.zero(f)
    grades = []
    power = DifferentialOperator.identity(f)
    for h in range(fam.order // 2 + 2):
        if h:
            power = compose(power, Ht)
        g = commutator(fam.part(h - 1).lift(f), Uop) + commutator(fam.part(h).lift(f), H)
        grades.append((h, g))
        if g:
            term = compose(g, power)
            rhs = rhs + (term if h % 2 == 0 else -term)
    rhs = rhs.scale(f.lift(fam.U).inverse())
    return TelescopeReport(lhs, rhs, grades)


def principal_symbol(T: DifferentialOperator, momentum_sign: int = 1) -> MomentumPolynomial:
    """Top-order coefficients read as a momentum polynomial (``d_i -> sign * p_i``).

    With ``sign = -1`` the map is a Lie morphism at top order:
    ``sym([A, B]) = {sym A, sym B}``.  With ``sign = +1`` it is an
    anti-morphism, ``sym([A, B]) = {sym B, sym A}``.
    """
    k = T.order()
    if k < 0:
        return MomentumPolynomial.zero(T.field)
    s = 1 if (momentum_sign > 0 or k % 2 == 0) else -1
    return MomentumPolynomial(T.field, {m: (c if s == 1 else -c)
                                        for m, c in T.terms.items() if sum(m) == k})
