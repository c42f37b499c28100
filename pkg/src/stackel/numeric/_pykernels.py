"""Numpy implementation of the rational-table evaluator (fallback kernel)."""

from __future__ import annotations

import numpy as np


def eval_table(coeffs, exps, bounds, ncoords, xs, roots):
    """Evaluate a flattened table of polynomials at a batch of points.

    ``coeffs[k]`` and ``exps[k, :]`` describe term ``k``; polynomial ``q``
    owns terms ``bounds[q]:bounds[q+1]``.  Coordinates (the first ``ncoords``
    ring variables) are surds: exponent ``e`` means ``x**(e//2) * sqrt(x)**(e%2)``.
    ``xs`` and ``roots`` are ``(npts, nvars)`` arrays.  Returns
    ``(values, magnitudes)`` of shape ``(npts, npoly)``; magnitudes are the
    sums of absolute term values, used for cancellation guards.
    """
    xs = np.asarray(xs, dtype=float)
    roots = np.asarray(roots, dtype=float)
    npts = xs.shape[0]
    npoly = len(bounds) - 1
    if len(coeffs) == 0:
        z = np.zeros((npts, npoly))
        return z, z.copy()
    half = exps.copy()
    half[:, :ncoords] //= 2
    odd = np.zeros_like(exps)
    odd[:, :ncoords] = exps[:, :ncoords] % 2
    with np.errstate(all="ignore"):
        mono = np.prod(xs[:, None, :] ** half[None, :, :], axis=2)
        mono *= np.prod(np.where(odd[None, :, :] > 0, roots[:, None, :], 1.0), axis=2)
    terms = mono * coeffs[None, :]
    vals = np.zeros((npts, npoly))
    mags = np.zeros((npts, npoly))
    starts = np.asarray(bounds[:-1])
    nonempty = starts < np.asarray(bounds[1:])
    if nonempty.any():
        idx = starts[nonempty]
        vals[:, nonempty] = np.add.reduceat(terms, idx, axis=1)
        mags[:, nonempty] = np.add.reduceat(np.abs(terms), idx, axis=1)
    return vals, mags
