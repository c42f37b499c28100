# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled rational-table evaluator; same contract as ``_pykernels.eval_table``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef inline double ipow(double x, long e) nogil:
    cdef double r = 1.0
    while e > 0:
        if e & 1:
            r *= x
        x *= x
        e >>= 1
    return r


def eval_table(double[::1] coeffs, long[:, ::1] exps, long[::1] bounds, long ncoords,
               double[:, ::1] xs, double[:, ::1] roots):
    cdef Py_ssize_t npts = xs.shape[0]
    cdef Py_ssize_t nvars = exps.shape[1]
    cdef Py_ssize_t npoly = bounds.shape[0] - 1
    vals_arr = np.zeros((npts, npoly))
    mags_arr = np.zeros((npts, npoly))
    cdef double[:, ::1] vals = vals_arr
    cdef double[:, ::1] mags = mags_arr
    cdef Py_ssize_t pt, q, k, v
    cdef long e
    cdef double m, acc, mag
    with nogil:
        for pt in range(npts):
            for q in range(npoly):
                acc = 0.0
                mag = 0.0
                for k in range(bounds[q], bounds[q + 1]):
                    m = coeffs[k]
                    for v in range(nvars):
                        e = exps[k, v]
                        if e:
                            if v < ncoords:
                                m *= ipow(xs[pt, v], e >> 1)
                                if e & 1:
                                    m *= roots[pt, v]
                            else:
                                m *= ipow(xs[pt, v], e)
                    acc += m
                    mag += fabs(m)
                vals[pt, q] = acc
                mags[pt, q] = mag
    return vals_arr, mags_arr
