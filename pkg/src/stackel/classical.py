"""Classical transforms: coupling constant metamorphosis, Jacobi and Staeckel."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import DegenerateInputError, GradingError, NotASymmetryError, UsageError
from .phase import (
    GradedSymmetry,
    MomentumPolynomial,
    SystemDefinition,
    as_phase,
    grade_decompose,
    momentum_degree,
    poisson_bracket,
    determining_equations,
)
from .scalar import Scalar, as_scalar

__all__ = [
    "CCMResult",
    "ccm_transform",
    "ccm_from_parameter",
    "jacobi_transform",
    "stackel_transform_2nd",
    "stackel_transform_general",
    "stackel_round_trip",
    "gaussian_curvature",
    "alpha_family",
]

ALPHA = "alpha"


@dataclass
class CCMResult:
    """Output of coupling constant metamorphosis.

    ``value`` is the transformed constant as a phase Scalar, ``hamiltonian``
    is ``H' = (H - E)/U``.
    """

    value: Scalar
    hamiltonian: Scalar
    numerator_degree: int
    denominator_degree: int

    @property
    def is_polynomial(self) -> bool:
        return self.denominator_degree == 0

    def as_polynomial(self) -> MomentumPolynomial:
        return MomentumPolynomial.from_phase(self.value)


def ccm_transform(K_alpha, H: MomentumPolynomial, U, E="E", alpha: str = ALPHA,
                  verify: bool = True) -> CCMResult:
    """``K' = K(-H')`` with ``H' = (H - E)/U``.

    ``K_alpha`` is a constant of the motion of ``H + alpha*U`` for symbolic
    ``alpha``; it may depend on ``alpha`` polynomially or rationally.
    """
    Kp = as_phase(K_alpha)
    f = Kp.field.union(as_phase(H).field).with_params(alpha)
    if isinstance(E, str):
        f = f.with_params(E)
        E = f.param(E)
    U = f.lift(as_scalar(U, f.without_momenta()) if not isinstance(U, Scalar) else U)
    if not U:
        raise DegenerateInputError("U is identically zero")
    Kp = f.lift(Kp)
    Hp = f.lift(as_phase(H))
    if verify:
        res = poisson_bracket(Kp, Hp + f.param(alpha) * U)
        if res:
            raise NotASymmetryError("K(alpha) does not commute with H + alpha*U", res)
    Hprime = (Hp - f.lift(as_scalar(E, f))) / U
    value = Kp.subs({alpha: -Hprime})
    if verify:
        res = poisson_bracket(value, Hprime)
        if res:
            raise NotASymmetryError("transformed constant fails to commute with H'", res)
    nd, dd = momentum_degree(value)
    return CCMResult(value, Hprime, nd, dd)


def ccm_from_parameter(K: MomentumPolynomial, H: MomentumPolynomial, param: str, U,
                       E="E", verify: bool = True) -> CCMResult:
    """Run CCM with ``alpha`` taken to be the coupling parameter ``param`` of ``U``.

    ``H`` is the full Hamiltonian containing ``param*U``; the ``alpha``-free
    part is ``H - param*U``.
    """
    f = K.field.union(H.field).with_params(ALPHA)
    U = as_scalar(U, f)
    base = H.lift(f) - MomentumPolynomial.constant(f.param(param) * U, f)
    if base.free_symbols() & {param}:
        raise UsageError(f"H is not of the form H0 + {param}*U")
    K_alpha = K.lift(f).subs({param: f.param(ALPHA)})
    return ccm_transform(K_alpha, base, U, E=E, verify=verify)


def jacobi_transform(K, H0: MomentumPolynomial, U, E="E", verify: bool = True,
                     order: int | None = None) -> MomentumPolynomial:
    """``K^ = sum_j (-(H0 - E)/U)^j K_{N-2j}`` for a symmetry of ``H0 + U``.

    ``order`` sets ``N`` when it exceeds the momentum degree of ``K``.
    """
    if not isinstance(K, GradedSymmetry):
        K = grade_decompose(K, order)
    f = K.field.union(H0.field)
    if isinstance(E, str):
        f = f.with_params(E)
        E = f.param(E)
    U = as_scalar(U, f) if not isinstance(U, Scalar) else f.union(U.field).lift(U)
    f = f.union(U.field)
    if not U:
        raise DegenerateInputError("U is identically zero")
    if verify:
        for label, r in determining_equations(K, H0.lift(f), U):
            if r:
                raise NotASymmetryError(f"determining equation {label} fails", r)
    shifted = (H0.lift(f) - MomentumPolynomial.constant(as_scalar(E, f), f)).scale(-U.inverse())
    out = MomentumPolynomial.zero(f)
    power = MomentumPolynomial.constant(1, f)
    for j, part in enumerate(K.parts):
        if j:
            power = power * shifted
        out = out + power * part.lift(f)
    if verify:
        Hhat = (H0.lift(f) - MomentumPolynomial.constant(as_scalar(E, f), f)).to_phase() / U
        r = poisson_bracket(out.to_phase(), Hhat)
        if r:
            raise NotASymmetryError("Jacobi transform fails to commute with (H0-E)/U", r)
    return out


def _zero_part(K: MomentumPolynomial) -> MomentumPolynomial:
    return K.homogeneous_part(0)


def stackel_transform_2nd(K: MomentumPolynomial, system: SystemDefinition, U=None,
                          K0U=None, verify: bool = True) -> MomentumPolynomial:
    """``K~ = K - (K0^U/U) H`` for a second-order constant ``K = K2 + K0``."""
    if K.degrees() - {0, 2} or 2 not in K.degrees():
        raise GradingError("K is not of the form K2 + K0")
    H = system.hamiltonian()
    f = K.field.union(H.field)
    if U is None:
        U = system.U
    U = as_scalar(U, f) if not isinstance(U, Scalar) else U
    f = f.union(U.field)
    if not U:
        raise DegenerateInputError("U is identically zero")
    if verify:
        r = poisson_bracket(K.lift(f), H.lift(f))
        if r:
            raise NotASymmetryError("K does not commute with H", r)
    if K0U is None:
        if not system.point:
            raise UsageError("restriction K0^U undefined: no coupling point and no explicit K0U")
        K0U = _zero_part(K).coefficient((0,) * K.n).subs(system.point)
    K0U = f.union(K0U.field).lift(K0U) if isinstance(K0U, Scalar) else as_scalar(K0U, f)
    f = f.union(K0U.field)
    out = K.lift(f) - H.lift(f).scale(K0U / U)
    if verify:
        r = poisson_bracket(out.to_phase(), H.lift(f).to_phase() / U)
        if r:
            raise NotASymmetryError("transformed constant fails to commute with H/U", r)
    return out


def stackel_round_trip(K: MomentumPolynomial, system: SystemDefinition,
                       unit_point: Mapping[str, object]) -> MomentumPolynomial:
    """Transform with ``U`` and back with ``1/U``; ``unit_point`` gives ``V = 1``."""
    Kt = stackel_transform_2nd(K, system)
    back = system.transformed()
    back.point = dict(unit_point)
    U_inv = back.potential_at()
    return stackel_transform_2nd(Kt, back, U=U_inv)


def alpha_family(K: MomentumPolynomial, coupling, point: Mapping[str, object],
                 alpha: str = ALPHA) -> MomentumPolynomial:
    """``K(b + alpha*b0)``: shift every coupling parameter along ``point``."""
    f = K.field.with_params(alpha)
    a = f.param(alpha)
    binding = {}
    for name in coupling:
        b0 = point.get(name, 0)
        b0 = as_scalar(b0, f) if not isinstance(b0, Scalar) else f.union(b0.field).lift(b0)
        base = f.param(name) if name in f.params else f.zero
        binding[name] = base + a * b0
    return K.lift(f).subs(binding)


def stackel_transform_general(K, system: SystemDefinition, point: Mapping[str, object] | None = None,
                              verify: bool = True) -> MomentumPolynomial:
    """Order-preserving Staeckel transform of a parameter-graded symmetry.

    ``K~ = K(b + alpha*b0)`` evaluated at ``alpha = -(H0 + V)/U`` with
    ``U = V(b0)``.
    """
    point = system.point if point is None else point
    if not point:
        raise UsageError("a coupling point b0 is required")
    if not isinstance(K, GradedSymmetry):
        K = grade_decompose(K)
    bad = K.parameter_grading_violations(system.coupling)
    if bad:
        raise GradingError(f"parameter grading violated in grades {bad}")
    H = system.hamiltonian()
    U = system.potential_at(point)
    if not U:
        raise DegenerateInputError("U = V(b0) is identically zero")
    if verify:
        r = poisson_bracket(K.total(), H)
        if r:
            raise NotASymmetryError("K does not commute with H", r)
    fam = alpha_family(K.total(), system.coupling, point)
    f = fam.field.union(H.field).union(U.field)
    fam = fam.lift(f)
    # collect powers of alpha coefficient-wise
    by_power: dict[int, MomentumPolynomial] = {}
    for m, c in fam.terms.items():
        for k, ck in c.coefficients_in(ALPHA).items():
            mono = MomentumPolynomial(f, {m: ck})
            by_power[k] = by_power.get(k, MomentumPolynomial.zero(f)) + mono
    shifted = H.lift(f).scale(-U.inverse())
    out = MomentumPolynomial.zero(f)
    for k in sorted(by_power):
        out = out + (shifted ** k) * by_power[k]
    if out.degree() > K.order:
        top = out.homogeneous_part(out.degree())
        raise GradingError(f"expansion has momentum degree {out.degree()} > {K.order}: {top}")
    if verify:
        r = poisson_bracket(out.to_phase(), H.lift(f).to_phase() / U)
        if r:
            raise NotASymmetryError("transformed constant fails to commute with H/U", r)
    return out


def gaussian_curvature(lam: Scalar) -> Scalar:
    """Curvature of ``lam (dx1^2 + dx2^2)``: ``-(1/(2 lam)) Laplacian(ln lam)``."""
    if lam.field.n != 2:
        raise UsageError("curvature formula is two-dimensional")
    lap_log = lam.field.zero
    for i in range(2):
        d = lam.diff(i)
        lap_log = lap_log + (lam * d.diff(i) - d * d) / (lam * lam)
    return -lap_log / (lam * 2)
