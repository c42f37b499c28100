"""Random-point evaluation, finite-difference brackets and trajectory drift."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from ..errors import SamplingError, SingularPointError, UsageError
from ..scalar import B, FunctionField, Scalar
from . import eval_table

__all__ = [
    "DEFAULT_SEED",
    "BOX",
    "CompiledFunctions",
    "Sampler",
    "eval_at",
    "flow_conserve",
    "fd_bracket_check",
    "DriftReport",
    "FDReport",
    "max_abs_at_random",
]

DEFAULT_SEED = 20240817

# coordinates, momenta, parameters
BOX = {"coords": (0.5, 2.0), "momenta": (-1.0, 1.0), "params": (0.5, 2.0)}

# relative size below which a denominator counts as vanishing
DEN_GUARD = 1e-12


def _phase(obj) -> Scalar:
    from ..phase import MomentumPolynomial

    if isinstance(obj, MomentumPolynomial):
        return obj.to_phase()
    if isinstance(obj, Scalar):
        return obj
    raise UsageError(f"cannot evaluate {type(obj).__name__}")


class CompiledFunctions:
    """A list of scalars flattened into one evaluation table."""

    def __init__(self, scalars: Sequence[Scalar]):
        scalars = [_phase(s) for s in scalars]
        if not scalars:
            raise UsageError("nothing to compile")
        f = scalars[0].field
        for s in scalars[1:]:
            f = f.union(s.field)
        self.field: FunctionField = f
        self.count = len(scalars)
        names = f.coords + f.momenta + f.params
        self.names = names
        coeffs, exps, bounds = [], [], [0]
        used = [False] * f.nvars
        self.surd = [False] * f.n
        for s in scalars:
            s = f.lift(s)
            for poly in (s.num, s.den):
                for e, c in B.terms(poly):
                    coeffs.append(float(c))
                    exps.append(e)
                    for i, k in enumerate(e):
                        if k:
                            used[i] = True
                            if i < f.n and k % 2:
                                self.surd[i] = True
                bounds.append(len(coeffs))
        self.coeffs = np.array(coeffs, dtype=np.float64)
        self.exps = np.array(exps, dtype=np.int64).reshape(len(coeffs), f.nvars)
        self.bounds = np.array(bounds, dtype=np.int64)
        self.required = [name for name, u in zip(names, used) if u]

    def arrays(self, point: Mapping[str, float]) -> tuple[np.ndarray, np.ndarray]:
        missing = [n for n in self.required if n not in point]
        if missing:
            raise UsageError(f"point lacks values for {missing}")
        xs = np.array([[float(point.get(n, 0.0)) for n in self.names]])
        roots = xs.copy()
        for i in range(self.field.n):
            x = xs[0, i]
            if self.surd[i]:
                if x < 0:
                    raise SingularPointError(f"sqrt of negative coordinate {self.names[i]}={x}")
                roots[0, i] = math.sqrt(x)
        return xs, roots

    def raw(self, xs: np.ndarray, roots: np.ndarray):
        return eval_table(self.coeffs, self.exps, self.bounds, self.field.n,
                          np.ascontiguousarray(xs), np.ascontiguousarray(roots))

    def finish(self, vals: np.ndarray, mags: np.ndarray) -> np.ndarray:
        num, den = vals[:, 0::2], vals[:, 1::2]
        dmag = mags[:, 1::2]
        bad = np.abs(den) <= DEN_GUARD * np.maximum(dmag, 1e-300)
        if bad.any():
            k = int(np.argwhere(bad)[0][1])
            raise SingularPointError(f"denominator of output {k} vanishes at the sample point")
        return num / den

    def __call__(self, point: Mapping[str, float]) -> np.ndarray:
        xs, roots = self.arrays(point)
        vals, mags = self.raw(xs, roots)
        return self.finish(vals, mags)[0]

    def min_relative_denominator(self, point: Mapping[str, float]) -> float:
        xs, roots = self.arrays(point)
        vals, mags = self.raw(xs, roots)
        den, dmag = vals[0, 1::2], mags[0, 1::2]
        return float(np.min(np.abs(den) / np.maximum(dmag, 1e-300)))


@lru_cache(maxsize=512)
def _compiled(s: Scalar) -> CompiledFunctions:
    return CompiledFunctions([s])


def eval_at(obj, point: Mapping[str, float]) -> float:
    """Double-precision value of a Scalar or MomentumPolynomial at ``point``.

    ``point`` maps coordinate, momentum and parameter names to floats.
    Raises :class:`SingularPointError` on a vanishing denominator or a square
    root of a negative coordinate.
    """
    return float(_compiled(_phase(obj))(point)[0])


class Sampler:
    """Deterministic random points inside the sampling box."""

    def __init__(self, field: FunctionField, seed: int = DEFAULT_SEED, box=None,
                 fixed: Mapping[str, float] | None = None, tries: int = 1000):
        self.field = field
        self.rng = np.random.default_rng(seed)
        self.box = dict(BOX, **(box or {}))
        self.fixed = dict(fixed or {})
        self.tries = tries
        self._tables: dict[tuple, CompiledFunctions] = {}

    def _raw_point(self) -> dict[str, float]:
        f = self.field
        lo, hi = self.box["coords"]
        pt = {c: float(self.rng.uniform(lo, hi)) for c in f.coords}
        lo, hi = self.box["momenta"]
        moms = f.momenta or tuple(f"p{i + 1}" for i in range(f.n))
        pt.update({m: float(self.rng.uniform(lo, hi)) for m in moms})
        lo, hi = self.box["params"]
        pt.update({p: float(self.rng.uniform(lo, hi)) for p in f.params})
        pt.update(self.fixed)
        return pt

    def draw(self, guards: Sequence = ()) -> dict[str, float]:
        """A point at which every object in ``guards`` evaluates regularly."""
        table = None
        if guards:
            key = tuple(guards)
            table = self._tables.get(key)
            if table is None:
                table = self._tables[key] = CompiledFunctions(list(guards))
        for _ in range(self.tries):
            pt = self._raw_point()
            if "x1" in pt and "x2" in pt and abs(pt["x1"] ** 2 - pt["x2"] ** 2) < 0.1:
                continue
            if table is not None:
                try:
                    if table.min_relative_denominator(pt) < 1e-6:
                        continue
                except SingularPointError:
                    continue
            return pt
        raise SamplingError("no regular sample point found; retry with a different seed")


def max_abs_at_random(obj, points: int = 5, seed: int = DEFAULT_SEED,
                      fixed: Mapping[str, float] | None = None) -> float:
    """Largest absolute value of ``obj`` over random regular points."""
    s = _phase(obj)
    sampler = Sampler(s.field, seed=seed, fixed=fixed)
    best = 0.0
    for _ in range(points):
        pt = sampler.draw([s])
        best = max(best, abs(eval_at(s, pt)))
    return best


# -- finite-difference bracket oracle -------------------------------------------

@dataclass
class FDReport:
    max_deviation: float
    points: int
    symbolic: list = dc_field(default_factory=list)
    numeric: list = dc_field(default_factory=list)


def fd_bracket_check(f, g, points: int = 5, seed: int = DEFAULT_SEED, step: float = 1e-4,
                     fixed: Mapping[str, float] | None = None) -> FDReport:
    """Compare the symbolic bracket with finite differences of ``f`` and ``g``.

    Gradients use the fourth-order five-point stencil.  Deviation is
    ``|fd - sym| / max(1, sum_j |f_xj g_pj| + |f_pj g_xj|)``: relative to the
    size of the products that cancel in the bracket, so exact zeros are
    judged on the scale of the terms that produce them.
    """
    from ..phase import as_phase, poisson_bracket

    fp, gp = as_phase(f), as_phase(g)
    fld = fp.field.union(gp.field)
    fp, gp = fld.lift(fp), fld.lift(gp)
    br = as_phase(poisson_bracket(fp, gp), fld)
    fns = CompiledFunctions([fp, gp])
    sym_table = CompiledFunctions([br])
    sampler = Sampler(fld, seed=seed, fixed=fixed)
    syms, nums, worst = [], [], 0.0
    for _ in range(points):
        pt = sampler.draw([fp, gp, br])
        sym = float(sym_table(pt)[0])
        grads = {}
        for name in fld.coords + fld.momenta:
            h = step * max(1.0, abs(pt[name]))
            vals = []
            for k in (2, 1, -1, -2):
                q = dict(pt)
                q[name] += k * h
                vals.append(fns(q))
            grads[name] = (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * h)
        fd, scale = 0.0, 0.0
        for x, p in zip(fld.coords, fld.momenta):
            u, v = grads[x][0] * grads[p][1], grads[p][0] * grads[x][1]
            fd += u - v
            scale += abs(u) + abs(v)
        fd = float(fd)
        syms.append(sym)
        nums.append(fd)
        worst = max(worst, abs(fd - sym) / max(1.0, float(scale)))
    return FDReport(worst, points, syms, nums)


# -- trajectories ----------------------------------------------------------------

@dataclass
class DriftReport:
    drifts: dict
    horizon: float
    t_end: float
    truncated: bool
    reason: str
    nfev: int
    initial: dict = dc_field(default_factory=dict)

    @property
    def max_drift(self) -> float:
        return max(self.drifts.values(), default=0.0)


def flow_conserve(H, K: Sequence | Mapping, x0: Sequence[float], p0: Sequence[float],
                  params: Mapping[str, float] | None = None, T: float = 10.0,
                  tol: float = 1e-10, samples: int = 2001) -> DriftReport:
    """Integrate Hamilton's equations and measure drift of each ``K``.

    Uses scipy's adaptive 8th-order Dormand-Prince scheme (``DOP853``) with
    ``rtol = atol = tol``.  Drift is ``max_t |K(t) - K(0)| / max(1, |K(0)|)``.
    Integration stops early (``truncated=True``) if the trajectory approaches
    a singular locus.
    """
    from scipy.integrate import solve_ivp

    from ..phase import as_phase

    if isinstance(K, Mapping):
        names, Ks = list(K), list(K.values())
    else:
        Ks = list(K)
        names = [f"K{i}" for i in range(len(Ks))]
    hp = as_phase(H)
    ks = [as_phase(k) for k in Ks]
    f = hp.field
    for k in ks:
        f = f.union(k.field)
    hp = f.lift(hp)
    ks = [f.lift(k) for k in ks]
    n = f.n
    rhs_funcs = [hp.diff(p) for p in f.momenta] + [-hp.diff(i) for i in range(n)]
    rhs = CompiledFunctions(rhs_funcs)
    obs = CompiledFunctions(ks) if ks else None
    params = dict(params or {})
    needed = set(rhs.required) | set(obs.required if obs is not None else ())
    missing = [p for p in f.params if p not in params and p in needed]
    if missing:
        raise UsageError(f"numeric values needed for parameters {missing}")
    pvals = np.array([float(params.get(p, 0.0)) for p in f.params])
    surd = [rhs.surd[i] or (obs is not None and obs.surd[i]) for i in range(n)]

    def arrays(y):
        xs = np.concatenate([y, pvals])[None, :]
        roots = xs.copy()
        for i in range(n):
            if surd[i]:
                roots[0, i] = math.sqrt(y[i]) if y[i] > 0 else 0.0
        return xs, roots

    def deriv(t, y):
        vals, mags = rhs.raw(*arrays(y))
        den = vals[0, 1::2]
        return vals[0, 0::2] / np.where(den == 0, 1e-300, den)

    def guard(t, y):
        vals, mags = rhs.raw(*arrays(y))
        rel = np.min(np.abs(vals[0, 1::2]) / np.maximum(mags[0, 1::2], 1e-300))
        margin = rel - 1e-8
        for i in range(n):
            if surd[i]:
                margin = min(margin, y[i] - 1e-8)
        return margin

    guard.terminal = True
    guard.direction = -1

    y0 = np.array(list(x0) + list(p0), dtype=float)
    if guard(0.0, y0) <= 0:
        raise SingularPointError("initial point is singular")

    def observe(y):
        return obs.finish(*obs.raw(*arrays(y)))[0]

    k0 = observe(y0) if obs is not None else np.zeros(0)
    t_eval = np.linspace(0.0, T, samples)
    sol = solve_ivp(deriv, (0.0, T), y0, method="DOP853", rtol=tol, atol=tol,
                    t_eval=t_eval, events=guard)
    truncated = sol.status == 1 or not sol.success
    reason = "singular locus reached" if sol.status == 1 else ("" if sol.success else sol.message)
    drift = np.zeros(len(ks))
    for j in range(sol.y.shape[1]):
        kv = observe(sol.y[:, j])
        drift = np.maximum(drift, np.abs(kv - k0) / np.maximum(1.0, np.abs(k0)))
    t_end = float(sol.t[-1]) if sol.t.size else 0.0
    return DriftReport(
        {name: float(d) for name, d in zip(names, drift)}, T, t_end, truncated, reason,
        int(sol.nfev), {name: float(v) for name, v in zip(names, k0)},
    )
