"""Exact multivariate polynomial kernels over Q.

Two interchangeable implementations sit behind one small function table:

* ``flint`` -- FLINT's ``fmpq_mpoly`` through python-flint (compiled C).
* ``python`` -- sympy's sparse ``PolyElement`` rings (pure-Python algorithms).

The compiled kernel is used when python-flint imports; set
``STACKEL_BACKEND=python`` to force the fallback.  Both use graded
lexicographic order, so leading coefficients (and therefore canonical forms)
agree between them.
"""

from __future__ import annotations

import os
from fractions import Fraction

__all__ = ["Backend", "FlintBackend", "PythonBackend", "backend", "get_backend"]


def _to_fraction(c) -> Fraction:
    num = getattr(c, "numerator", None)
    if num is None:
        return Fraction(int(c.p), int(c.q))
    return Fraction(int(num), int(c.denominator))


class Backend:
    """Function table shared by both kernels.

    Polynomials are opaque native objects that support ``+ - *``, integer
    powers and ``==``.  Everything else goes through these methods.
    """

    name = "abstract"

    def ring(self, names: tuple[str, ...]): ...
    def gens(self, ring) -> list: ...
    def const(self, ring, value) -> object: ...
    def is_zero(self, p) -> bool: ...
    def is_one(self, p) -> bool: ...
    def gcd(self, a, b): ...
    def exquo(self, a, b): ...

    def divrem(self, a, b):
        return divmod(a, b)
    def diff(self, p, i: int): ...
    def lc(self, p) -> Fraction: ...
    def terms(self, p) -> list[tuple[tuple[int, ...], Fraction]]: ...
    def from_terms(self, ring, terms: dict) -> object: ...
    def rref(self, rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]: ...

    def convert(self, p, ring, index_map: list[int], nvars: int):
        """Move ``p`` into ``ring``; variable ``i`` becomes ``index_map[i]``."""
        out = {}
        for exps, c in self.terms(p):
            e = [0] * nvars
            for i, k in enumerate(exps):
                if k:
                    e[index_map[i]] = k
            out[tuple(e)] = c
        return self.from_terms(ring, out)

    def scale(self, p, c: Fraction): ...


class FlintBackend(Backend):
    name = "flint"

    def __init__(self):
        import flint

        self._flint = flint
        self._fmpq = flint.fmpq

    def ring(self, names):
        return self._flint.fmpq_mpoly_ctx.get(tuple(names), "deglex")

    def gens(self, ring):
        return list(ring.gens())

    def const(self, ring, value):
        value = Fraction(value)
        return ring.constant(self._fmpq(value.numerator, value.denominator))

    def is_zero(self, p):
        return p.is_zero()

    def is_one(self, p):
        return p.is_one()

    def gcd(self, a, b):
        return a.gcd(b)

    def exquo(self, a, b):
        return a / b

    def diff(self, p, i):
        return p.derivative(i)

    def lc(self, p):
        return _to_fraction(p.leading_coefficient())

    def terms(self, p):
        return [
            (tuple(int(k) for k in e), _to_fraction(c)) for e, c in zip(p.monoms(), p.coeffs())
        ]

    def from_terms(self, ring, terms):
        fmpq = self._fmpq
        return ring.from_dict(
            {e: fmpq(c.numerator, c.denominator) for e, c in terms.items() if c}
        )

    def scale(self, p, c):
        c = Fraction(c)
        return p * self._fmpq(c.numerator, c.denominator)

    def rref(self, rows, ncols):
        fmpq = self._fmpq
        m = self._flint.fmpq_mat(
            len(rows), ncols, [fmpq(x.numerator, x.denominator) for r in rows for x in r]
        )
        red, rank = m.rref()
        out = [[_to_fraction(red[i, j]) for j in range(ncols)] for i in range(rank)]
        pivots = [next(j for j in range(ncols) if row[j]) for row in out]
        return out, pivots


class PythonBackend(Backend):
    name = "python"

    def __init__(self):
        from sympy.polys.domains import QQ
        from sympy.polys.orderings import grlex
        from sympy.polys.rings import PolyRing

        self._QQ = QQ
        self._grlex = grlex
        self._PolyRing = PolyRing
        self._rings: dict[tuple[str, ...], object] = {}

    def ring(self, names):
        names = tuple(names)
        r = self._rings.get(names)
        if r is None:
            r = self._rings[names] = self._PolyRing(names, self._QQ, self._grlex)
        return r

    def gens(self, ring):
        return list(ring.gens)

    def const(self, ring, value):
        value = Fraction(value)
        return ring.ground_new(self._QQ(value.numerator, value.denominator))

    def is_zero(self, p):
        return not p

    def is_one(self, p):
        return p == 1

    def gcd(self, a, b):
        return a.gcd(b)

    def exquo(self, a, b):
        return a.exquo(b)

    def diff(self, p, i):
        return p.diff(p.ring.gens[i])

    def lc(self, p):
        return _to_fraction(p.LC)

    def terms(self, p):
        return [(tuple(int(k) for k in e), _to_fraction(c)) for e, c in p.terms()]

    def from_terms(self, ring, terms):
        QQ = self._QQ
        return ring.from_dict(
            {e: QQ(c.numerator, c.denominator) for e, c in terms.items() if c}
        )

    def scale(self, p, c):
        c = Fraction(c)
        return p * self._QQ(c.numerator, c.denominator)

    def rref(self, rows, ncols):
        from sympy.polys.matrices import DomainMatrix

        QQ = self._QQ
        m = DomainMatrix(
            [[QQ(x.numerator, x.denominator) for x in r] for r in rows], (len(rows), ncols), QQ
        )
        red, pivots = m.rref()
        dense = red.to_list()
        out = [[_to_fraction(x) for x in dense[i]] for i in range(len(pivots))]
        return out, list(pivots)


def get_backend(name: str | None = None) -> Backend:
    """Return a kernel by name (``flint`` or ``python``); ``None`` picks the fastest."""
    if name is None:
        name = os.environ.get("STACKEL_BACKEND", "").strip().lower() or None
    if name in (None, "flint"):
        try:
            return FlintBackend()
        except ImportError:
            if name == "flint":
                raise
    if name in (None, "python", "sympy"):
        return PythonBackend()
    raise ValueError(f"unknown polynomial backend {name!r}")


backend: Backend = get_backend()
