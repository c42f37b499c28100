"""Compiled kernels against their pure-Python fallbacks.

Two kernel pairs are timed:

* numeric: the Cython rational-table evaluator against the numpy one, on the
  gradient table of the fourth-order system (single points, as in the ODE
  right-hand side, and a batch of points);
* exact: FLINT polynomial arithmetic against sympy's sparse rings, on the
  commutator of two quantum generators.

Run with ``python benchmarks/bench_kernels.py``.  Results are checked for
agreement before any timing is reported.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from stackel.catalog import load_example
from stackel.numeric import _pykernels
from stackel.numeric.harness import CompiledFunctions, Sampler
from stackel.phase import as_phase

try:
    from stackel.numeric import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_numeric(points: int, repeat: int, seed: int) -> list[tuple[str, float, float]]:
    sf = load_example(3)
    funcs = []
    for name in ("H", "K2", "K4"):
        s = as_phase(sf.bindings()[name])
        funcs.extend(s.diff(i) for i in range(s.field.n))
        funcs.extend(s.diff(p) for p in s.field.momenta)
    table = CompiledFunctions(funcs)
    sampler = Sampler(table.field, seed=seed)
    rows = []
    for _ in range(points):
        xs, roots = table.arrays(sampler.draw())
        rows.append((xs[0], roots[0]))
    xs = np.ascontiguousarray(np.array([r[0] for r in rows]))
    roots = np.ascontiguousarray(np.array([r[1] for r in rows]))
    args = (table.coeffs, table.exps, table.bounds, table.field.n)
    single = [(np.ascontiguousarray(xs[i:i + 1]), np.ascontiguousarray(roots[i:i + 1]))
              for i in range(min(points, 200))]

    kernels = {"numpy": _pykernels.eval_table}
    if _ckernels is not None:
        kernels["cython"] = _ckernels.eval_table
        ref, mags = _pykernels.eval_table(*args, xs, roots)
        got = _ckernels.eval_table(*args, xs, roots)[0]
        # summation order differs, so compare against the term magnitudes
        if np.any(np.abs(ref - got) > 1e-12 * np.maximum(mags, 1.0)):
            raise SystemExit("kernels disagree")
    out = []
    for name, fn in kernels.items():
        t_batch = _best(lambda: fn(*args, xs, roots), repeat)
        t_single = _best(lambda: [fn(*args, a, b) for a, b in single], repeat) / len(single)
        out.append((name, t_single, t_batch))
    return out


_EXACT = """
import time
from stackel import commutator
from stackel.catalog import load_example
sf = load_example(5)
H, K2, K4 = sf.hamiltonian, sf.symmetries["K2"], sf.symmetries["K4"]
t = time.perf_counter()
R = commutator(K2, K4)
ok = not commutator(H, R)
print(time.perf_counter() - t, ok)
"""


def bench_exact() -> list[tuple[str, float, bool]]:
    out = []
    for backend in ("flint", "python"):
        env = dict(os.environ, STACKEL_BACKEND=backend)
        res = subprocess.run([sys.executable, "-c", _EXACT], env=env, capture_output=True, text=True,
                             check=True)
        secs, ok = res.stdout.split()
        out.append((backend, float(secs), ok == "True"))
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=20240817)
    ap.add_argument("--skip-exact", action="store_true", help="time only the numeric kernels")
    args = ap.parse_args(argv)

    print(f"numeric kernel: gradient table of H, K2, K4 ({args.points} points)")
    rows = bench_numeric(args.points, args.repeat, args.seed)
    base = dict((r[0], r) for r in rows)["numpy"]
    for name, single, batch in rows:
        print(f"  {name:7s} single point {single * 1e6:9.1f} us   batch {batch * 1e3:8.2f} ms"
              f"   speedup {base[1] / single:5.1f}x / {base[2] / batch:5.1f}x")
    if _ckernels is None:
        print("  cython kernel not built; only the numpy fallback was timed")
    if not args.skip_exact:
        print("exact kernel: [K2, K4] and [H, [K2, K4]] for the quantum fourth-order system")
        rows = bench_exact()
        slow = max(r[1] for r in rows)
        for name, secs, ok in rows:
            print(f"  {name:7s} {secs:8.3f} s   {'agrees' if ok else 'WRONG'}   speedup {slow / secs:5.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
