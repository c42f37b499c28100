"""System definition files.

An INI-style text format read with :mod:`configparser`::

    # comments start with '#'
    [system]
    name = Anisotropic oscillator
    mode = quantum                 # or classical (default)
    coordinates = x1, x2
    parameters = a, b, c, alpha
    graded = a                     # weight-2 parameters for relations

    [metric]
    lambda = 1                     # or g11 = ..., g12 = ..., g22 = ...

    [potential]
    V = a*(9*x1^2 + x2^2)
    U = 9*x1^2 + x2^2 + c
    coupling = a                   # V is linear in these
    point = a: 1                   # coupling point b0 with V(b0) = U
    constant = d                   # additive constant joining the coupling family
    family = a: 1                  # K(alpha) = K(a + alpha*1); omit if K uses alpha
    alpha = alpha                  # name of the family parameter
    shift = b                      # additive constant of the transformed system
    ambiguities = L                # alpha-free symmetries quotiented out

    [symmetries]
    L = d22 + (a + alpha)*x2^2     # later entries may use earlier names
    K = {x1*d2 - x2*d1, d22} + ...

    [relations]
    KR = [K, R] = 32*H^2*K + ...   # name = left = right

    [ambiguities]
    K1 = K2, H                     # readings of an undefined symbol

    [errata]
    KR = KR_fixed: note          # printed entry, its correction, and why

    [expected]
    Ht = (d11 + d22 + a*(9*x1^2 + x2^2) + b)/(9*x1^2 + x2^2 + c)

    [numeric]
    x0 = 1, 1
    p0 = 0.3, -0.2
    params = b1: -1, b2: 1
    horizon = 10
    tol = 1e-10

The Hamiltonian is ``sum g^ij p_i p_j + V`` (classical) or
``lam^-1 (d11 + d22) + V`` (quantum) unless ``hamiltonian`` is given in
``[system]``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Mapping

from .algebra import RelationSpec
from .errors import ParseError, UsageError
from .operators import DifferentialOperator, hamiltonian_operator
from .parser import parse_expression
from .phase import MomentumPolynomial, SystemDefinition
from .scalar import FunctionField, Scalar

__all__ = ["SystemFile", "load_system", "loads_system"]

_SECTIONS = {"system", "metric", "potential", "symmetries", "relations", "ambiguities", "expected",
             "errata", "numeric"}


def _names(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.replace("\n", ",").split(",") if t.strip())


def _pairs(text: str) -> list[tuple[str, str]]:
    out = []
    for item in _names(text):
        for sep in (":", "="):
            if sep in item:
                k, v = item.split(sep, 1)
                out.append((k.strip(), v.strip()))
                break
        else:
            raise UsageError(f"expected 'name: value', got {item!r}")
    return out


@dataclass
class SystemFile:
    """Parsed system definition; all expressions are canonical objects."""

    name: str
    mode: str
    field: FunctionField
    lam: Scalar | None
    metric: list | None
    V: Scalar
    U: Scalar | None
    coupling: tuple[str, ...]
    point: dict[str, Scalar]
    hamiltonian: object
    symmetries: dict[str, object]
    relations: list[RelationSpec]
    ambiguities: dict[str, tuple[str, ...]] = dc_field(default_factory=dict)
    graded: tuple[str, ...] = ()
    alpha: str = "alpha"
    shift: str = "b"
    alpha_ambiguities: tuple[str, ...] = ()
    constant: str | None = None
    family: dict[str, Scalar] = dc_field(default_factory=dict)
    expected: dict[str, str] = dc_field(default_factory=dict)
    errata: dict[str, tuple[str, str]] = dc_field(default_factory=dict)
    numeric: dict[str, object] = dc_field(default_factory=dict)
    source: str = ""

    @property
    def quantum(self) -> bool:
        return self.mode == "quantum"

    def bindings(self) -> dict[str, object]:
        out = {"H": self.hamiltonian}
        out.update(self.symmetries)
        return out

    def system(self) -> SystemDefinition:
        """Classical system for the transforms; the additive constant joins the family."""
        if self.quantum:
            raise UsageError("classical system requested from a quantum file")
        V, coupling = self.V, self.coupling
        if self.constant:
            V = V + self.field.param(self.constant)
            coupling = coupling + (self.constant,)
        return SystemDefinition(self.field, V, lam=self.lam if self.metric is None else None,
                                metric=self.metric, coupling=coupling, U=self.U,
                                point=self.point, name=self.name)

    def alpha_family(self, obj):
        """``K(alpha)``: shift each family parameter ``q`` to ``q + alpha*v_q``."""
        if not self.family:
            return obj
        f = self.field if self.alpha in self.field.params else self.field.with_params(self.alpha)
        a = f.param(self.alpha)
        return obj.subs({q: f.param(q) + a * f.lift(v) for q, v in self.family.items()})

    def expected_object(self, name: str):
        return self.parse(self.expected[name])

    def parse(self, text: str):
        """Parse an expression in this file's mode with its names bound."""
        return parse_expression(text, self.field, self.mode, self.bindings())


def _reader() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",),
                                   inline_comment_prefixes=("#",), interpolation=None,
                                   empty_lines_in_values=False)
    cp.optionxform = str
    return cp


def loads_system(text: str, source: str = "<string>") -> SystemFile:
    """Parse system-file text."""
    cp = _reader()
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ParseError(f"{source}: {exc}") from exc
    unknown = set(cp.sections()) - _SECTIONS
    if unknown:
        raise ParseError(f"{source}: unknown section(s) {sorted(unknown)}")
    if not cp.has_section("system"):
        raise ParseError(f"{source}: missing [system] section")
    sysd = cp["system"]
    mode = sysd.get("mode", "classical").strip()
    if mode not in ("classical", "quantum"):
        raise ParseError(f"{source}: mode must be classical or quantum")
    coords = _names(sysd.get("coordinates", "x1, x2"))
    params = _names(sysd.get("parameters", ""))
    f = FunctionField(coords, params)

    def expr(text, what, m="scalar", bindings=None):
        try:
            return parse_expression(text, f, m, bindings)
        except ParseError as exc:
            raise ParseError(f"{source}: {what}: {exc.message}", exc.line, exc.column) from exc

    lam, metric = None, None
    if cp.has_section("metric"):
        msec = cp["metric"]
        if "lambda" in msec:
            lam = expr(msec["lambda"], "lambda")
        elif any(k.startswith("g") for k in msec):
            n = len(coords)
            metric = [[f.zero] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    key = f"g{i + 1}{j + 1}"
                    if key in msec:
                        metric[i][j] = metric[j][i] = expr(msec[key], key)
    if lam is None and metric is None:
        lam = f.one
    pot = cp["potential"] if cp.has_section("potential") else {}
    V = expr(pot.get("V", "0"), "V")
    U = expr(pot["U"], "U") if "U" in pot else None
    coupling = _names(pot.get("coupling", ""))
    point = {k: expr(v, f"point {k}") for k, v in _pairs(pot.get("point", ""))}
    alpha = pot.get("alpha", "alpha").strip()
    constant = pot.get("constant", "").strip() or None
    if constant and constant not in params:
        raise ParseError(f"{source}: constant {constant!r} is not a declared parameter")
    family = {k: expr(v, f"family {k}") for k, v in _pairs(pot.get("family", ""))}
    shift = pot.get("shift", "b").strip()

    if "hamiltonian" in sysd:
        H = expr(sysd["hamiltonian"], "hamiltonian", mode)
    elif mode == "quantum":
        if metric is not None:
            raise UsageError("quantum systems take a conformal factor lambda")
        H = hamiltonian_operator(lam, V)
    else:
        H = SystemDefinition(f, V, lam=lam if metric is None else None, metric=metric).hamiltonian()
    if mode == "classical" and isinstance(H, Scalar):
        H = MomentumPolynomial.constant(H, f)

    bindings: dict[str, object] = {"H": H}
    symmetries: dict[str, object] = {}
    if cp.has_section("symmetries"):
        for name, text in cp["symmetries"].items():
            obj = expr(text, f"symmetry {name}", mode, bindings)
            if mode == "classical" and isinstance(obj, Scalar) and not obj.field.momenta:
                obj = MomentumPolynomial.constant(obj, f)
            if mode == "quantum" and isinstance(obj, Scalar):
                obj = DifferentialOperator.multiplication(obj)
            symmetries[name] = bindings[name] = obj
    relations = []
    if cp.has_section("relations"):
        for name, text in cp["relations"].items():
            if "=" not in text:
                raise ParseError(f"{source}: relation {name} needs 'left = right'")
            left, right = (s.strip() for s in text.split("=", 1))
            relations.append(RelationSpec(name, left, right, mode == "quantum"))
    ambiguities = {}
    if cp.has_section("ambiguities"):
        ambiguities = {k: _names(v) for k, v in cp["ambiguities"].items()}
    errata = {}
    if cp.has_section("errata"):
        for name, text in cp["errata"].items():
            fixed, _, note = text.partition(":")
            errata[name] = (fixed.strip(), note.strip())
    numeric: dict[str, object] = {}
    if cp.has_section("numeric"):
        nsec = cp["numeric"]
        for key in ("x0", "p0"):
            if key in nsec:
                numeric[key] = [float(v) for v in _names(nsec[key])]
        if "params" in nsec:
            numeric["params"] = {k: float(v) for k, v in _pairs(nsec["params"])}
        for key in ("horizon", "tol"):
            if key in nsec:
                numeric[key] = float(nsec[key])
        if "check" in nsec:
            numeric["check"] = _names(nsec["check"])
    return SystemFile(
        name=sysd.get("name", source).strip(), mode=mode, field=f, lam=lam, metric=metric,
        V=V, U=U, coupling=coupling, point=point, hamiltonian=H, symmetries=symmetries,
        relations=relations, ambiguities=ambiguities, graded=_names(sysd.get("graded", "")),
        alpha=alpha, shift=shift, alpha_ambiguities=_names(pot.get("ambiguities", "")),
        constant=constant, family=family,
        expected=dict(cp["expected"]) if cp.has_section("expected") else {},
        errata=errata,
        numeric=numeric, source=source,
    )


def load_system(path: str | Path) -> SystemFile:
    """Read a system file from disk."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return loads_system(text, source=str(path))
