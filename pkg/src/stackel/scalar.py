"""Exact rational functions of coordinates, momenta and parameters.

A :class:`Scalar` is a reduced quotient of two polynomials over Q.  Square
roots of coordinates are handled with surd variables ``t_i`` where
``x_i = t_i**2``, so ``sqrt(x1)`` and ``x1**(-3/2)`` stay inside ordinary
polynomial rings.  Parameters never depend on the coordinates.

Canonical form: numerator and denominator are coprime and the denominator's
leading coefficient (graded lex order, coordinates first, then momenta, then
parameters in declaration order) is 1.  Two scalars are equal iff their
canonical forms are identical.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

from . import _backend
from .errors import DegenerateInputError, UsageError

__all__ = ["FunctionField", "Scalar", "as_scalar", "default_field"]

B = _backend.backend

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")

Number = Union[int, Fraction, Rational]


class FunctionField:
    """Declares the variables a family of scalars may depend on.

    Instances are interned: equal declarations give the same object, so field
    identity is a cheap compatibility test.
    """

    _interned: dict[tuple, "FunctionField"] = {}

    __slots__ = (
        "coords", "momenta", "params", "n", "ring", "nvars",
        "_index", "_gens", "_zero", "_one", "_key",
    )

    def __new__(cls, coords: Iterable[str] = ("x1", "x2"), params: Iterable[str] = (),
                momenta: Iterable[str] = ()):
        key = (tuple(coords), tuple(momenta), tuple(params))
        field = cls._interned.get(key)
        if field is not None:
            return field
        names = key[0] + key[1] + key[2]
        for name in names:
            if not _IDENT.match(name):
                raise UsageError(f"invalid symbol name {name!r}")
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate symbol names in {names}")
        if momenta and len(key[1]) != len(key[0]):
            raise UsageError("need exactly one momentum per coordinate")
        field = object.__new__(cls)
        field.coords, field.momenta, field.params = key
        field.n = len(field.coords)
        field._key = key
        ring_names = tuple(f"{c}_h" for c in field.coords) + field.momenta + field.params
        field.nvars = len(ring_names)
        field.ring = B.ring(ring_names)
        field._gens = B.gens(field.ring)
        field._index = {c: i for i, c in enumerate(field.coords)}
        field._index.update({m: field.n + i for i, m in enumerate(field.momenta)})
        off = field.n + len(field.momenta)
        field._index.update({p: off + i for i, p in enumerate(field.params)})
        field._zero = B.const(field.ring, 0)
        field._one = B.const(field.ring, 1)
        cls._interned[key] = field
        return field

    def __reduce__(self):
        return (FunctionField, (self.coords, self.params, self.momenta))

    def __repr__(self):
        extra = f", momenta={self.momenta}" if self.momenta else ""
        return f"FunctionField(coords={self.coords}, params={self.params}{extra})"

    # -- element construction -------------------------------------------

    @property
    def zero(self) -> "Scalar":
        return Scalar._raw(self, self._zero, self._one)

    @property
    def one(self) -> "Scalar":
        return Scalar._raw(self, self._one, self._one)

    def __call__(self, value) -> "Scalar":
        if isinstance(value, Scalar):
            return self.lift(value)
        value = Fraction(value)
        return Scalar._raw(self, B.const(self.ring, value), self._one)

    def coordinate_index(self, var) -> int:
        """0-based coordinate index from an int or a coordinate name."""
        if isinstance(var, int):
            if not 0 <= var < self.n:
                raise UsageError(f"coordinate index {var} out of range for n={self.n}")
            return var
        try:
            return self.coords.index(var)
        except ValueError:
            raise UsageError(f"{var!r} is not a coordinate") from None

    def coord(self, var) -> "Scalar":
        t = self._gens[self.coordinate_index(var)]
        return Scalar._raw(self, t * t, self._one)

    def sqrt_coord(self, var) -> "Scalar":
        return Scalar._raw(self, self._gens[self.coordinate_index(var)], self._one)

    def param(self, name: str) -> "Scalar":
        if name not in self.params:
            raise UsageError(f"{name!r} is not a declared parameter")
        return Scalar._raw(self, self._gens[self._index[name]], self._one)

    def momentum(self, var) -> "Scalar":
        if not self.momenta:
            raise UsageError("field has no momentum variables")
        if isinstance(var, int):
            var = self.momenta[var]
        if var not in self.momenta:
            raise UsageError(f"{var!r} is not a momentum")
        return Scalar._raw(self, self._gens[self._index[var]], self._one)

    def symbol(self, name: str) -> "Scalar":
        """Coordinate (as ``x``, not its root), momentum or parameter by name."""
        if name in self.coords:
            return self.coord(name)
        if name in self.momenta:
            return self.momentum(name)
        return self.param(name)

    # -- field bookkeeping ----------------------------------------------

    def with_params(self, *names: str) -> "FunctionField":
        extra = tuple(p for p in names if p not in self.params)
        if not extra:
            return self
        return FunctionField(self.coords, self.params + extra, self.momenta)

    def with_momenta(self, names: Iterable[str] | None = None) -> "FunctionField":
        if names is None:
            names = tuple(f"p{i + 1}" for i in range(self.n))
        names = tuple(names)
        if self.momenta == names:
            return self
        if self.momenta:
            raise UsageError("field already carries different momenta")
        return FunctionField(self.coords, self.params, names)

    def without_momenta(self) -> "FunctionField":
        return FunctionField(self.coords, self.params)

    def union(self, other: "FunctionField") -> "FunctionField":
        if other is self:
            return self
        if other.coords != self.coords:
            raise UsageError(f"coordinate mismatch: {self.coords} vs {other.coords}")
        if self.momenta and other.momenta and self.momenta != other.momenta:
            raise UsageError("momentum mismatch")
        momenta = self.momenta or other.momenta
        params = self.params + tuple(p for p in other.params if p not in self.params)
        return FunctionField(self.coords, params, momenta)

    def lift(self, s: "Scalar") -> "Scalar":
        """Re-express ``s`` in this field.

        Symbols of ``s.field`` that are absent here are allowed only when
        ``s`` does not actually depend on them.
        """
        if s.field is self:
            return s
        src = s.field
        if src.coords != self.coords:
            raise UsageError("cannot move scalars between coordinate systems")
        index_map = [self._index.get(name, -1) for name in src.coords + src.momenta + src.params]
        if -1 in index_map:
            used = s.free_symbols()
            for name, j in zip(src.coords + src.momenta + src.params, index_map):
                if j < 0 and name in used:
                    raise UsageError(f"symbol {name!r} is not available in {self}")

        def move(p):
            out = {}
            for exps, c in B.terms(p):
                e = [0] * self.nvars
                for i, k in enumerate(exps):
                    if k:
                        e[index_map[i]] = k
                out[tuple(e)] = c
            return B.from_terms(self.ring, out)

        num, den = move(s.num), move(s.den)
        if B.is_zero(num):
            return self.zero
        return _normalized(self, num, den)

    def index(self, name: str) -> int:
        return self._index[name]

    def ring_name(self, i: int) -> str:
        """Printable name of ring variable ``i`` (surds print as their coordinate)."""
        if i < self.n:
            return self.coords[i]
        return (self.momenta + self.params)[i - self.n]


def default_field(n: int = 2, params: Iterable[str] = ()) -> FunctionField:
    return FunctionField(tuple(f"x{i + 1}" for i in range(n)), tuple(params))


def _unify(a: "Scalar", b) -> tuple["Scalar", "Scalar"]:
    if isinstance(b, Scalar):
        if b.field is a.field:
            return a, b
        f = a.field.union(b.field)
        return f.lift(a), f.lift(b)
    if isinstance(b, (int, Fraction)) or isinstance(b, Rational):
        return a, a.field(b)
    return NotImplemented, NotImplemented


class Scalar:
    """Immutable element of a :class:`FunctionField`."""

    __slots__ = ("field", "num", "den", "_dcache", "_hash")

    def __init__(self, field: FunctionField, num, den=None):
        if den is None:
            den = field._one
        if B.is_zero(den):
            raise DegenerateInputError("zero denominator")
        num, den = _reduce(num, den)
        self.field, self.num, self.den = field, num, den
        self._dcache = None
        self._hash = None

    @classmethod
    def _raw(cls, field, num, den) -> "Scalar":
        s = object.__new__(cls)
        s.field, s.num, s.den = field, num, den
        s._dcache = None
        s._hash = None
        return s

    @classmethod
    def _make(cls, field, num, den) -> "Scalar":
        if B.is_zero(den):
            raise DegenerateInputError("zero denominator")
        num, den = _reduce(num, den)
        return cls._raw(field, num, den)

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return B.is_zero(self.num)

    def __bool__(self):
        return not B.is_zero(self.num)

    def is_polynomial(self) -> bool:
        return B.is_one(self.den)

    def is_constant(self) -> bool:
        return B.is_one(self.den) and all(not any(e) for e, _ in B.terms(self.num))

    def constant_value(self) -> Fraction:
        if B.is_zero(self.num):
            return Fraction(0)
        if not self.is_constant():
            raise UsageError(f"{self} is not a constant")
        return B.terms(self.num)[0][1]

    def free_symbols(self) -> set[str]:
        seen = set()
        for p in (self.num, self.den):
            for exps, _ in B.terms(p):
                for i, k in enumerate(exps):
                    if k:
                        seen.add(self.field.ring_name(i))
        return seen

    def depends_on(self, name: str) -> bool:
        if name not in self.field._index:
            return False
        i = self.field._index[name]
        return any(e[i] for p in (self.num, self.den) for e, _ in B.terms(p))

    def is_coordinate_free(self) -> bool:
        n = self.field.n
        return not any(any(e[:n]) for p in (self.num, self.den) for e, _ in B.terms(p))

    def has_surds(self) -> bool:
        """True if some coordinate appears with an odd power of its root."""
        n = self.field.n
        return any(k % 2 for p in (self.num, self.den) for e, _ in B.terms(p) for k in e[:n])

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        a, b = _unify(self, other)
        if a is NotImplemented:
            return NotImplemented
        if B.is_zero(b.num):
            return a
        if B.is_zero(a.num):
            return b
        if a.den == b.den:
            num = a.num + b.num
            if B.is_one(a.den):
                return Scalar._raw(a.field, num, a.den)
            return Scalar._make(a.field, num, a.den)
        if B.is_one(a.den):
            return Scalar._raw(a.field, a.num * b.den + b.num, b.den)
        if B.is_one(b.den):
            return Scalar._raw(a.field, a.num + b.num * a.den, a.den)
        g = B.gcd(a.den, b.den)
        if B.is_one(g):
            return Scalar._make(a.field, a.num * b.den + b.num * a.den, a.den * b.den)
        ad, bd = B.exquo(a.den, g), B.exquo(b.den, g)
        num = a.num * bd + b.num * ad
        return Scalar._make(a.field, num, ad * b.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(self.field, -self.num, self.den)

    def __sub__(self, other):
        a, b = _unify(self, other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        a, b = _unify(self, other)
        if a is NotImplemented:
            return NotImplemented
        return b + (-a)

    def __mul__(self, other):
        a, b = _unify(self, other)
        if a is NotImplemented:
            return NotImplemented
        f = a.field
        if B.is_zero(a.num) or B.is_zero(b.num):
            return f.zero
        if B.is_one(a.den) and B.is_one(b.den):
            return Scalar._raw(f, a.num * b.num, f._one)
        g1 = B.gcd(a.num, b.den)
        g2 = B.gcd(b.num, a.den)
        an, bd = (a.num, b.den) if B.is_one(g1) else (B.exquo(a.num, g1), B.exquo(b.den, g1))
        bn, ad = (b.num, a.den) if B.is_one(g2) else (B.exquo(b.num, g2), B.exquo(a.den, g2))
        return _normalized(f, an * bn, ad * bd)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if B.is_zero(self.num):
            raise DegenerateInputError("division by zero scalar")
        return _normalized(self.field, self.den, self.num)

    def __truediv__(self, other):
        a, b = _unify(self, other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        a, b = _unify(self, other)
        if a is NotImplemented:
            return NotImplemented
        return b * a.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise UsageError("only integer powers of scalars are supported")
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return self.field.one
        return Scalar._raw(self.field, self.num ** k, self.den ** k)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Scalar) and other.field is self.field:
            return self.num == other.num and self.den == other.den
        a, b = _unify(self, other)
        if a is NotImplemented:
            return NotImplemented
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((
                self.field._key,
                frozenset(B.terms(self.num)),
                frozenset(B.terms(self.den)),
            ))
        return self._hash

    # -- calculus ---------------------------------------------------------

    def diff(self, var) -> "Scalar":
        """Exact partial derivative.

        ``var`` is a 0-based coordinate index, or the name of a coordinate,
        momentum or parameter.  For coordinates the surd chain rule
        ``d/dx = (2 t)^{-1} d/dt`` is applied.
        """
        f = self.field
        if isinstance(var, int):
            i = f.coordinate_index(var)
        else:
            if var not in f._index:
                if var in f.coords or _IDENT.match(str(var)):
                    return f.zero
                raise UsageError(f"unknown variable {var!r}")
            i = f._index[var]
        cache = self._dcache
        if cache is None:
            cache = self._dcache = {}
        hit = cache.get(i)
        if hit is not None:
            return hit
        num, den = _quotient_rule(self.num, self.den, i)
        if B.is_zero(num):
            out = f.zero
        else:
            if i < f.n:
                # n/d already coprime: only the new factor t can cancel
                t = f._gens[i]
                q, r = B.divrem(num, t)
                if B.is_zero(r):
                    num = q
                else:
                    den = den * t
                num = B.scale(num, Fraction(1, 2))
            out = _normalized(f, num, den)
        cache[i] = out
        return out

    def diff_multi(self, orders: tuple[int, ...]) -> "Scalar":
        """Mixed coordinate derivative ``d^orders`` (one order per coordinate)."""
        s = self
        for i, k in enumerate(orders):
            for _ in range(k):
                s = s.diff(i)
                if B.is_zero(s.num):
                    return s
        return s

    # -- substitution -----------------------------------------------------

    def subs(self, bindings: Mapping[str, object]) -> "Scalar":
        """Simultaneously replace parameters (or momenta) by scalars.

        Coordinates cannot be substituted.
        """
        f = self.field
        values = {}
        target = f
        for name, v in bindings.items():
            if name in f.coords:
                raise UsageError(f"cannot substitute coordinate {name!r}")
            if name not in f._index:
                if not _IDENT.match(str(name)):
                    raise UsageError(f"invalid symbol {name!r}")
                continue
            if not isinstance(v, Scalar):
                v = f(v)
            values[name] = v
            target = target.union(v.field)
        if not values:
            return self
        values = {k: target.lift(v) for k, v in values.items()}
        src = target.lift(self)
        idx = [(target._index[k], v) for k, v in values.items()]
        powers: dict[tuple[int, int], Scalar] = {}

        def power(j, v, k):
            got = powers.get((j, k))
            if got is None:
                got = powers[(j, k)] = v ** k
            return got

        def sub_poly(p):
            groups: dict[tuple, dict] = {}
            for exps, c in B.terms(p):
                key = tuple(exps[j] for j, _ in idx)
                rest = list(exps)
                for j, _ in idx:
                    rest[j] = 0
                groups.setdefault(key, {})[tuple(rest)] = c
            total = target.zero
            for key, rest_terms in groups.items():
                term = Scalar._raw(target, B.from_terms(target.ring, rest_terms), target._one)
                for (j, v), k in zip(idx, key):
                    if k:
                        term = term * power(j, v, k)
                total = total + term
            return total

        return sub_poly(src.num) / sub_poly(src.den)

    def coefficients_in(self, name: str) -> dict[int, "Scalar"]:
        """Split a scalar polynomial in parameter ``name`` into its coefficients."""
        f = self.field
        if name not in f._index:
            return {0: self}
        j = f._index[name]
        if any(e[j] for e, _ in B.terms(self.den)):
            raise UsageError(f"{name!r} appears in a denominator")
        groups: dict[int, dict] = {}
        for exps, c in B.terms(self.num):
            rest = list(exps)
            rest[j] = 0
            groups.setdefault(exps[j], {})[tuple(rest)] = c
        return {
            k: Scalar._make(f, B.from_terms(f.ring, t), self.den) for k, t in groups.items()
        }

    def degree_in(self, names: Iterable[str]) -> int | None:
        """Homogeneous degree in the given parameters, or None if inhomogeneous.

        The zero scalar reports 0.
        """
        f = self.field
        idx = [f._index[n] for n in names if n in f._index]
        if B.is_zero(self.num):
            return 0

        def degs(p):
            return {sum(e[i] for i in idx) for e, _ in B.terms(p)}

        dn, dd = degs(self.num), degs(self.den)
        if len(dn) != 1 or len(dd) != 1:
            return None
        return dn.pop() - dd.pop()

    def max_degree_in(self, names: Iterable[str]) -> int:
        f = self.field
        idx = [f._index[n] for n in names if n in f._index]
        if B.is_zero(self.num):
            return 0
        dn = max(sum(e[i] for i in idx) for e, _ in B.terms(self.num))
        dd = min(sum(e[i] for i in idx) for e, _ in B.terms(self.den))
        return dn - dd

    # -- numeric ----------------------------------------------------------

    def evaluate(self, point: Mapping[str, float]) -> float:
        from .numeric.harness import eval_at

        return eval_at(self, point)

    # -- printing ---------------------------------------------------------

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r})"


def as_scalar(value, field: FunctionField) -> Scalar:
    if isinstance(value, Scalar):
        return field.lift(value) if value.field is not field else value
    return field(value)


def _reduce(num, den):
    if B.is_zero(num):
        return num, B.const(_ring(num), 1) if not B.is_one(den) else den
    if not B.is_one(den):
        g = B.gcd(num, den)
        if not B.is_one(g):
            num, den = B.exquo(num, g), B.exquo(den, g)
    lc = B.lc(den)
    if lc != 1:
        inv = 1 / lc
        num, den = B.scale(num, inv), B.scale(den, inv)
    return num, den


def _quotient_rule(n, d, i):
    """Coprime ``(num, den)`` of ``d/dv (n/d)`` for coprime ``n, d``.

    With ``g = gcd(d, d')`` the quotient ``(n' d/g - n d'/g) / (d * d/g)``
    can only share factors with ``g``, so one small gcd replaces the gcd
    against ``d^2``.
    """
    dn = B.diff(n, i)
    if B.is_one(d):
        return dn, d
    dd = B.diff(d, i)
    if B.is_zero(dd):
        num, den = dn, d
        g = B.gcd(num, den)
    else:
        g = B.gcd(d, dd)
        dg, ddg = B.exquo(d, g), B.exquo(dd, g)
        num, den = dn * dg - n * ddg, d * dg
        if B.is_zero(num):
            return num, den
        g = B.gcd(num, g)
    if not B.is_one(g):
        num, den = B.exquo(num, g), B.exquo(den, g)
    return num, den


def _ring(p):
    return p.context() if hasattr(p, "context") else p.ring


def _normalized(field, num, den) -> Scalar:
    """Build from an already-coprime pair, fixing only the leading coefficient."""
    if B.is_zero(num):
        return field.zero
    lc = B.lc(den)
    if lc != 1:
        inv = 1 / lc
        num, den = B.scale(num, inv), B.scale(den, inv)
    return Scalar._raw(field, num, den)


def _normalized_reduce(field, num, den) -> Scalar:
    num, den = _reduce(num, den)
    return Scalar._raw(field, num, den)


# -- printing ------------------------------------------------------------

def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(field: FunctionField, exps: tuple[int, ...]) -> list[str]:
    parts = []
    for i, k in enumerate(exps):
        if not k:
            continue
        name = field.ring_name(i)
        if i < field.n:
            if k % 2 == 0:
                k //= 2
                parts.append(name if k == 1 else f"{name}^{k}")
            elif k == 1:
                parts.append(f"sqrt({name})")
            else:
                parts.append(f"{name}^({k}/2)")
        else:
            parts.append(name if k == 1 else f"{name}^{k}")
    return parts


def _term_key(exps):
    return (-sum(exps), tuple(-e for e in exps))


def format_poly(field: FunctionField, p) -> tuple[str, int]:
    """Render a polynomial; also return its number of terms."""
    terms = sorted(B.terms(p), key=lambda t: _term_key(t[0]))
    if not terms:
        return "0", 0
    out = []
    for exps, c in terms:
        mono = format_monomial(field, exps)
        sign = "-" if c < 0 else "+"
        c = abs(c)
        if not mono:
            body = _format_fraction(c)
        elif c == 1:
            body = "*".join(mono)
        else:
            body = _format_fraction(c) + "*" + "*".join(mono)
        out.append((sign, body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text, len(terms)


def format_scalar(s: Scalar) -> str:
    num, den = s.num, s.den
    if B.is_one(den):
        return format_poly(s.field, num)[0]
    # display with an integer denominator: (9*x1^2 + x2^2) rather than (x1^2 + 1/9*x2^2)
    scale = math.lcm(*(c.denominator for _, c in B.terms(den)))
    if scale != 1:
        num, den = B.scale(num, Fraction(scale)), B.scale(den, Fraction(scale))
    num, nterms = format_poly(s.field, num)
    den, dterms = format_poly(s.field, den)
    if nterms > 1:
        num = f"({num})"
    return f"{num}/({den})"
