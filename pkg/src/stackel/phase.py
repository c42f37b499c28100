"""Phase-space functions, Poisson brackets and symmetry checks.

Two representations are used:

* :class:`MomentumPolynomial` -- a polynomial in ``p_1..p_n`` whose
  coefficients are :class:`~stackel.scalar.Scalar` functions of the
  coordinates and parameters.  Hamiltonians and polynomial constants of the
  motion live here.
* phase functions -- a plain :class:`Scalar` over a field that also carries
  momentum symbols.  These hold outputs that are rational in the momenta
  (coupling constant metamorphosis), and the bracket on them is computed with
  the quotient rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping, Sequence

from .errors import GradingError, SamplingError, UsageError
from .scalar import FunctionField, Scalar, _unify, as_scalar

__all__ = [
    "MomentumPolynomial",
    "GradedSymmetry",
    "SystemDefinition",
    "BracketReport",
    "RankReport",
    "poisson_bracket",
    "is_constant_of_motion",
    "grade_decompose",
    "determining_equations",
    "functional_independence",
    "as_phase",
    "momentum_degree",
]


def _monomial_key(m):
    return (-sum(m), tuple(-e for e in m))


class MomentumPolynomial:
    """Polynomial in the momenta with scalar coefficients."""

    __slots__ = ("field", "terms", "_hash")

    def __init__(self, field: FunctionField, terms: Mapping[tuple[int, ...], object] | None = None):
        if field.momenta:
            field = field.without_momenta()
        self.field = field
        clean = {}
        for m, c in (terms or {}).items():
            c = as_scalar(c, field)
            if c:
                if len(m) != field.n:
                    raise UsageError(f"momentum multi-index {m} does not match n={field.n}")
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
    def constant(cls, value, field: FunctionField) -> "MomentumPolynomial":
        s = as_scalar(value, field.without_momenta() if field.momenta else field)
        return cls._raw(s.field, {(0,) * s.field.n: s} if s else {})

    @classmethod
    def momentum(cls, i: int, field: FunctionField) -> "MomentumPolynomial":
        f = field.without_momenta() if field.momenta else field
        m = [0] * f.n
        m[i] = 1
        return cls._raw(f, {tuple(m): f.one})

    @classmethod
    def zero(cls, field: FunctionField) -> "MomentumPolynomial":
        return cls._raw(field.without_momenta() if field.momenta else field, {})

    @classmethod
    def from_phase(cls, s: Scalar) -> "MomentumPolynomial":
        """Convert a phase function that is polynomial in the momenta."""
        f = s.field
        if not f.momenta:
            return cls.constant(s, f)
        base = f.without_momenta()
        den = s.den
        mom_idx = [f.index(m) for m in f.momenta]
        from .scalar import B

        for exps, _ in B.terms(den):
            if any(exps[i] for i in mom_idx):
                raise UsageError("phase function is not polynomial in the momenta")
        groups: dict[tuple, dict] = {}
        for exps, c in B.terms(s.num):
            key = tuple(exps[i] for i in mom_idx)
            rest = list(exps)
            for i in mom_idx:
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = c
        terms = {}
        for key, rest in groups.items():
            coeff = Scalar._make(f, B.from_terms(f.ring, rest), den)
            terms[key] = base.lift(coeff)
        return cls._raw(base, terms)

    # -- basic properties -------------------------------------------------

    @property
    def n(self) -> int:
        return self.field.n

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Total momentum degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def degrees(self) -> set[int]:
        return {sum(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_part(self, d: int) -> "MomentumPolynomial":
        return MomentumPolynomial._raw(self.field, {m: c for m, c in self.terms.items() if sum(m) == d})

    def coefficient(self, m: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(m), self.field.zero)

    def free_symbols(self) -> set[str]:
        out = set()
        for c in self.terms.values():
            out |= c.free_symbols()
        return out

    # -- field handling ---------------------------------------------------

    def lift(self, field: FunctionField) -> "MomentumPolynomial":
        if field.momenta:
            field = field.without_momenta()
        if field is self.field:
            return self
        return MomentumPolynomial._raw(field, {m: field.lift(c) for m, c in self.terms.items()})

    def _coerce(self, other):
        if isinstance(other, MomentumPolynomial):
            if other.field is self.field:
                return self, other
            f = self.field.union(other.field)
            return self.lift(f), other.lift(f)
        if isinstance(other, Scalar):
            if other.field.momenta:
                return NotImplemented, NotImplemented
            f = self.field.union(other.field)
            return self.lift(f), MomentumPolynomial.constant(other, f)
        try:
            return self, MomentumPolynomial.constant(other, self.field)
        except (TypeError, ValueError):
            return NotImplemented, NotImplemented

    # -- arithmetic -------------------------------------------------------

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
        return MomentumPolynomial._raw(a.field, terms)

    __radd__ = __add__

    def __neg__(self):
        return MomentumPolynomial._raw(self.field, {m: -c for m, c in self.terms.items()})

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

    def scale(self, s) -> "MomentumPolynomial":
        s = s if isinstance(s, Scalar) else self.field(s)
        f = self.field.union(s.field) if s.field is not self.field else self.field
        a = self.lift(f)
        s = f.lift(s)
        if not s:
            return MomentumPolynomial._raw(f, {})
        return MomentumPolynomial._raw(f, {m: c * s for m, c in a.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Scalar) and not other.field.momenta:
            return self.scale(other)
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        if len(b.terms) == 1 and (0,) * a.n in b.terms:
            return a.scale(b.terms[(0,) * a.n])
        terms: dict[tuple, Scalar] = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                m = tuple(i + j for i, j in zip(m1, m2))
                prod = c1 * c2
                s = terms.get(m)
                terms[m] = prod if s is None else s + prod
        return MomentumPolynomial._raw(a.field, {m: c for m, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MomentumPolynomial):
            if other.degree() > 0:
                return NotImplemented
            other = other.coefficient((0,) * other.n)
        if isinstance(other, Scalar) and other.field.momenta:
            return NotImplemented
        s = other if isinstance(other, Scalar) else self.field(other)
        return self.scale(s.inverse())

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise UsageError("momentum polynomials support non-negative integer powers only")
        out = MomentumPolynomial.constant(1, self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, MomentumPolynomial):
            a, b = self._coerce(other)
            return a.terms == b.terms
        if isinstance(other, (Scalar, int)):
            a, b = self._coerce(other)
            if a is NotImplemented:
                return NotImplemented
            return a.terms == b.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- calculus ---------------------------------------------------------

    def diff_x(self, i: int) -> "MomentumPolynomial":
        terms = {}
        for m, c in self.terms.items():
            d = c.diff(i)
            if d:
                terms[m] = d
        return MomentumPolynomial._raw(self.field, terms)

    def diff_p(self, i: int) -> "MomentumPolynomial":
        terms = {}
        for m, c in self.terms.items():
            k = m[i]
            if k:
                mm = list(m)
                mm[i] -= 1
                terms[tuple(mm)] = c * k
        return MomentumPolynomial._raw(self.field, terms)

    def subs(self, bindings: Mapping[str, object]) -> "MomentumPolynomial":
        """Substitute parameters in every coefficient."""
        out = None
        for m, c in self.terms.items():
            mono = MomentumPolynomial._raw(c.field, {m: c.field.one})
            term = mono.scale(c.subs(bindings))
            out = term if out is None else out + term
        return out if out is not None else MomentumPolynomial.zero(self.field)

    def map_coefficients(self, fn) -> "MomentumPolynomial":
        out = MomentumPolynomial.zero(self.field)
        for m, c in self.terms.items():
            v = fn(c)
            mono = MomentumPolynomial._raw(v.field, {m: v.field.one})
            out = out + mono.scale(v)
        return out

    def to_phase(self, field: FunctionField | None = None) -> Scalar:
        """The same function as a phase Scalar over a field with momenta."""
        pf = (field or self.field).with_momenta() if not (field and field.momenta) else field
        if not pf.momenta:
            pf = pf.with_momenta()
        ps = [pf.momentum(i) for i in range(pf.n)]
        total = pf.zero
        for m, c in self.terms.items():
            mono = pf.lift(c)
            for p, k in zip(ps, m):
                if k:
                    mono = mono * p ** k
            total = total + mono
        return total

    def evaluate(self, point: Mapping[str, float]) -> float:
        from .numeric.harness import eval_at

        return eval_at(self, point)

    # -- printing ---------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m in sorted(self.terms, key=_monomial_key):
            cs = str(self.terms[m])
            sign = "+"
            if cs.startswith("-") and " " not in cs:
                sign, cs = "-", cs[1:]
            mono = "*".join(
                (f"p{i + 1}" if k == 1 else f"p{i + 1}^{k}") for i, k in enumerate(m) if k
            )
            if not mono:
                body = cs if " " not in cs else f"({cs})"
            elif cs == "1":
                body = mono
            else:
                body = (cs if " " not in cs and "/" not in cs else f"({cs})") + "*" + mono
            pieces.append((sign, body))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"MomentumPolynomial({str(self)!r})"


# -- phase functions ---------------------------------------------------------

def as_phase(obj, field: FunctionField | None = None) -> Scalar:
    """Coerce a MomentumPolynomial or Scalar into a phase Scalar (with momenta)."""
    if isinstance(obj, MomentumPolynomial):
        return obj.to_phase(field)
    if isinstance(obj, Scalar):
        f = obj.field if obj.field.momenta else obj.field.with_momenta()
        if field is not None:
            f = f.union(field if field.momenta else field.with_momenta())
        return f.lift(obj)
    raise UsageError(f"cannot interpret {type(obj).__name__} as a phase function")


def momentum_degree(s: Scalar) -> tuple[int, int]:
    """Momentum degree of the numerator and denominator of a phase Scalar."""
    from .scalar import B

    f = s.field
    idx = [f.index(m) for m in f.momenta]

    def deg(p):
        return max((sum(e[i] for i in idx) for e, _ in B.terms(p)), default=0)

    return deg(s.num), deg(s.den)


def _phase_bracket(f: Scalar, g: Scalar) -> Scalar:
    f, g = _unify(f, g)
    fld = f.field
    total = fld.zero
    for j, pname in enumerate(fld.momenta):
        a = f.diff(j)
        if a:
            b = g.diff(pname)
            if b:
                total = total + a * b
        c = f.diff(pname)
        if c:
            d = g.diff(j)
            if d:
                total = total - c * d
    return total


def poisson_bracket(f, g):
    """``{f, g} = sum_j (df/dx_j dg/dp_j - df/dp_j dg/dx_j)``.

    Two momentum polynomials give a momentum polynomial; any rational phase
    function in the mix gives a phase Scalar (quotient rule).
    """
    if isinstance(f, MomentumPolynomial) and isinstance(g, MomentumPolynomial):
        if f.n != g.n:
            raise UsageError(f"dimension mismatch: {f.n} vs {g.n}")
        f, g = f._coerce(g)
        out = MomentumPolynomial.zero(f.field)
        for j in range(f.n):
            fx, gp = f.diff_x(j), g.diff_p(j)
            if fx and gp:
                out = out + fx * gp
            fp, gx = f.diff_p(j), g.diff_x(j)
            if fp and gx:
                out = out - fp * gx
        return out
    if isinstance(f, Scalar) and not f.field.momenta and isinstance(g, MomentumPolynomial):
        return poisson_bracket(MomentumPolynomial.constant(f, f.field), g)
    if isinstance(g, Scalar) and not g.field.momenta and isinstance(f, MomentumPolynomial):
        return poisson_bracket(f, MomentumPolynomial.constant(g, g.field))
    fp, gp = as_phase(f), as_phase(g)
    if fp.field.n != gp.field.n:
        raise UsageError("dimension mismatch")
    return _phase_bracket(fp, gp)


@dataclass
class BracketReport:
    residual: object
    verdict: bool

    def __bool__(self):
        return self.verdict


def is_constant_of_motion(H, K) -> BracketReport:
    r = poisson_bracket(H, K)
    return BracketReport(r, not bool(r))


# -- grading ------------------------------------------------------------------

class GradedSymmetry:
    """``K = K_N + K_{N-2} + ...`` with each part homogeneous in the momenta."""

    def __init__(self, parts: Sequence[MomentumPolynomial], order: int | None = None):
        parts = list(parts)
        if not parts:
            raise GradingError("empty graded symmetry")
        if order is None:
            order = parts[0].degree()
        self.order = order
        field = parts[0].field
        for p in parts[1:]:
            field = field.union(p.field)
        self.parts = [p.lift(field) for p in parts]
        self.field = field
        if len(self.parts) != order // 2 + 1:
            raise GradingError(f"order {order} needs {order // 2 + 1} parts, got {len(self.parts)}")
        for j, p in enumerate(self.parts):
            if p and p.degrees() != {order - 2 * j}:
                raise GradingError(f"part {j} is not homogeneous of degree {order - 2 * j}")

    def part(self, degree: int) -> MomentumPolynomial:
        if degree < 0 or degree > self.order or (self.order - degree) % 2:
            return MomentumPolynomial.zero(self.field)
        return self.parts[(self.order - degree) // 2]

    def total(self) -> MomentumPolynomial:
        out = MomentumPolynomial.zero(self.field)
        for p in self.parts:
            out = out + p
        return out

    def parameter_grading_violations(self, params: Iterable[str]) -> list[int]:
        """Grades whose coefficients are not of parameter degree ``j``."""
        params = tuple(params)
        bad = []
        for j, p in enumerate(self.parts):
            for c in p.terms.values():
                if c.degree_in(params) != j:
                    bad.append(self.order - 2 * j)
                    break
        return bad

    def __repr__(self):
        return f"GradedSymmetry(order={self.order}, parts={[str(p) for p in self.parts]})"


def grade_decompose(K: MomentumPolynomial, order: int | None = None) -> GradedSymmetry:
    """Split ``K`` into momentum-homogeneous parts ``K_N, K_{N-2}, ...``.

    ``order`` places ``K`` in a higher grade than its momentum degree, e.g. a
    bracket whose top parts cancel; missing parts are zero.
    """
    if isinstance(K, Scalar) and not K.field.momenta:
        K = MomentumPolynomial.constant(K, K.field)
    if not K and order is None:
        raise GradingError("cannot grade the zero polynomial")
    degs = K.degrees() if K else set()
    if len({d % 2 for d in degs}) > 1:
        raise GradingError(f"mixed momentum parity {sorted(degs)}: not a graded symmetry")
    N = max(degs) if order is None else order
    if degs and (max(degs) > N or (N - max(degs)) % 2):
        raise GradingError(f"degrees {sorted(degs)} do not fit order {N}")
    return GradedSymmetry([K.homogeneous_part(N - 2 * j) for j in range(N // 2 + 1)], N)


def determining_equations(K: GradedSymmetry, H0, U=None) -> list[tuple[str, MomentumPolynomial]]:
    """Residuals of the graded symmetry conditions for ``H0 + U``.

    ``H0`` may also be a :class:`SystemDefinition`, in which case its kinetic
    term and potential are used.
    """
    if isinstance(H0, SystemDefinition):
        sys_ = H0
        H0 = sys_.kinetic()
        if U is None:
            U = sys_.potential
    if U is None:
        raise UsageError("a potential U is required")
    Up = MomentumPolynomial.constant(U, U.field)
    N = K.order
    out = [(f"{{K{N},H0}}", poisson_bracket(K.part(N), H0))]
    for k in range(N // 2):
        hi, lo = N - 2 * k, N - 2 * k - 2
        r = poisson_bracket(K.part(hi), Up) + poisson_bracket(K.part(lo), H0)
        out.append((f"{{K{hi},U}}+{{K{lo},H0}}", r))
    if N % 2:
        out.append(("{K1,U}", poisson_bracket(K.part(1), Up)))
    return out


# -- systems ------------------------------------------------------------------

class SystemDefinition:
    """Metric, potential family and distinguished potential of a system.

    Either ``lam`` (conformally flat, ``g^{ij} = delta^{ij}/lam``) or an
    explicit contravariant ``metric`` matrix must be given.
    """

    def __init__(self, field: FunctionField, potential=0, *, lam=None, metric=None,
                 coupling: Sequence[str] = (), U=None, point: Mapping[str, object] | None = None,
                 name: str = ""):
        self.field = field.without_momenta() if field.momenta else field
        self.n = self.field.n
        if metric is None:
            lam = as_scalar(1 if lam is None else lam, self.field)
            if not lam:
                from .errors import DegenerateInputError

                raise DegenerateInputError("conformal factor is zero")
            inv = lam.inverse()
            metric = [[inv if i == j else self.field.zero for j in range(self.n)] for i in range(self.n)]
        else:
            metric = [[as_scalar(v, self.field) for v in row] for row in metric]
            for i in range(self.n):
                for j in range(self.n):
                    if metric[i][j] != metric[j][i]:
                        raise UsageError("metric must be symmetric")
            lam = None
        self.lam = lam
        self.metric = metric
        self.potential = as_scalar(potential, self.field)
        self.coupling = tuple(coupling)
        self.point = dict(point or {})
        self._U = as_scalar(U, self.field) if U is not None else None
        self.name = name

    def kinetic(self) -> MomentumPolynomial:
        terms = {}
        for i in range(self.n):
            for j in range(i, self.n):
                g = self.metric[i][j]
                if not g:
                    continue
                m = [0] * self.n
                m[i] += 1
                m[j] += 1
                terms[tuple(m)] = g if i == j else g * 2
        return MomentumPolynomial(self.field, terms)

    def hamiltonian(self) -> MomentumPolynomial:
        return self.kinetic() + MomentumPolynomial.constant(self.potential, self.field)

    def restrict(self, s, point: Mapping[str, object] | None = None):
        """Restrict a scalar/polynomial to the potential ``V = V(b0)`` (substitute couplings)."""
        point = self.point if point is None else point
        if not point:
            raise UsageError("no coupling point declared")
        return s.subs(point)

    def potential_at(self, point: Mapping[str, object] | None = None) -> Scalar:
        return self.restrict(self.potential, point)

    @property
    def U(self) -> Scalar:
        if self._U is not None:
            return self._U
        if self.point:
            return self.potential_at()
        raise UsageError("system has no distinguished potential U")

    def spot_basis(self) -> tuple[Scalar, list[Scalar]]:
        """Split ``V = b_0 + sum U^(i) b_i`` into its coupling coefficients."""
        if not self.coupling:
            raise UsageError("no coupling parameters declared")
        rest = self.potential
        basis = []
        for name in self.coupling:
            coeffs = rest.coefficients_in(name)
            if set(coeffs) - {0, 1}:
                raise GradingError(f"potential is not linear in {name!r}")
            basis.append(coeffs.get(1, self.field.zero))
            rest = coeffs.get(0, self.field.zero)
        return rest, basis

    def check_spot(self, seed: int = 0) -> bool:
        """Numerically test linear independence of ``{1, U^(i)}`` at random points."""
        import numpy as np

        from .numeric.harness import Sampler, eval_at

        rest, basis = self.spot_basis()
        funcs = [self.field.one] + [b for b in basis if not (b.is_constant() and not b)]
        const_count = sum(1 for b in basis if b.is_constant())
        if const_count > 1:
            return False
        funcs = [self.field.one] + [b for b in basis if not b.is_constant()]
        sampler = Sampler(self.field, seed=seed)
        rows = []
        for _ in range(len(funcs) + 3):
            pt = sampler.draw(funcs)
            rows.append([eval_at(f, pt) for f in funcs])
        sv = np.linalg.svd(np.array(rows), compute_uv=False)
        return bool(sv[-1] > 1e-9 * sv[0])

    def transformed(self, U=None) -> "SystemDefinition":
        """The system ``H/U`` (metric and potential divided by ``U``)."""
        U = self.U if U is None else as_scalar(U, self.field)
        f = self.field.union(U.field)
        metric = [[f.lift(g) / U for g in row] for row in self.metric]
        out = SystemDefinition(f, f.lift(self.potential) / U, metric=metric,
                               coupling=self.coupling, name=f"{self.name}/U" if self.name else "")
        if self.lam is not None:
            out.lam = f.lift(self.lam) * U
        return out

    def __repr__(self):
        return f"SystemDefinition(n={self.n}, V={self.potential})"


# -- functional independence -------------------------------------------------

@dataclass
class RankReport:
    rank: int
    count: int
    points: int
    singular_values: list = dc_field(default_factory=list)
    note: str = "classical numeric rank only"

    @property
    def independent(self) -> bool:
        return self.rank == self.count


def functional_independence(symmetries: Sequence, *, seed: int = 0, points: int = 5,
                            tol: float = 1e-8, params: Mapping[str, float] | None = None) -> RankReport:
    """Max numeric rank of the Jacobian d(K_i)/d(x, p) over random regular points."""
    import numpy as np

    from .numeric.harness import CompiledFunctions, Sampler

    if not symmetries:
        raise UsageError("need at least one function")
    phases = [as_phase(s) for s in symmetries]
    f = phases[0].field
    for s in phases[1:]:
        f = f.union(s.field)
    phases = [f.lift(s) for s in phases]
    grads = []
    for s in phases:
        grads.extend(s.diff(i) for i in range(f.n))
        grads.extend(s.diff(p) for p in f.momenta)
    table = CompiledFunctions(grads)
    sampler = Sampler(f, seed=seed, fixed=params)
    best, svals, used = 0, [], 0
    for _ in range(points):
        try:
            pt = sampler.draw(grads)
        except SamplingError:
            continue
        J = table(pt).reshape(len(phases), 2 * f.n)
        sv = np.linalg.svd(J, compute_uv=False)
        rank = int(np.sum(sv > tol * max(sv[0], 1e-300))) if sv.size and sv[0] > 0 else 0
        used += 1
        if rank >= best:
            best, svals = rank, [float(x) for x in sv]
    if not used:
        raise SamplingError("no regular sample point found")
    return RankReport(best, len(phases), used, svals)
