# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled oracle kernels; see ``_kernels_py`` for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def _flags(arr):
    arr = np.ascontiguousarray(arr)
    # booleans are one byte each; reinterpret instead of copying
    return arr.view(np.uint8) if arr.dtype == np.bool_ else arr.astype(np.uint8) != 0


def tally_wins(theta1, theta2, trade1, trade2):
    cdef double[::1] t1 = np.ascontiguousarray(theta1, dtype=np.float64)
    cdef double[::1] t2 = np.ascontiguousarray(theta2, dtype=np.float64)
    cdef cnp.uint8_t[::1] a1 = _flags(trade1).view(np.uint8)
    cdef cnp.uint8_t[::1] a2 = _flags(trade2).view(np.uint8)
    cdef Py_ssize_t i, n = t1.shape[0]
    cdef long long wins = 0
    cdef int both
    with nogil:
        # branch-free: trade flags are unpredictable in simulation batches
        for i in range(n):
            both = (a1[i] != 0) & (a2[i] != 0)
            wins += (both & (t1[i] < t2[i])) | ((1 - both) & (t1[i] > t2[i]))
    return int(wins)


def interp_rows(x, y, t):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[:, ::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t s = xv.shape[0], k = xv.shape[1], m = tv.shape[1]
    out = np.empty((s, m), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t r, j, lo, hi, mid
    cdef double q, w, width
    with nogil:
        for r in range(s):
            for j in range(m):
                q = tv[r, j]
                if q <= xv[r, 0]:
                    q = xv[r, 0]
                if q >= xv[r, k - 1]:
                    q = xv[r, k - 1]
                # first knot strictly right of q, clipped to [1, k-1]
                lo = 0
                hi = k
                while lo < hi:
                    mid = (lo + hi) // 2
                    if xv[r, mid] <= q:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < 1:
                    lo = 1
                if lo > k - 1:
                    lo = k - 1
                width = xv[r, lo] - xv[r, lo - 1]
                if width > 0:
                    w = (q - xv[r, lo - 1]) / width
                else:
                    w = 1.0
                ov[r, j] = yv[r, lo - 1] + w * (yv[r, lo] - yv[r, lo - 1])
    return out


def min_monotone_linear(coef, lo, hi):
    cdef double[::1] c = np.ascontiguousarray(coef, dtype=np.float64)
    cdef double[::1] l = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[::1] h = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t m = c.shape[0]
    if m == 0:
        return 0.0
    cdef double[::1] vals = np.unique(np.concatenate([np.asarray(l), np.asarray(h)]))
    cdef Py_ssize_t nv = vals.shape[0]
    cdef double[::1] best = np.empty(nv, dtype=np.float64)
    cdef Py_ssize_t i, k
    cdef double reach, v, out
    with nogil:
        for i in range(nv):
            v = vals[i]
            best[i] = c[0] * v if (v >= l[0] and v <= h[0]) else INFINITY
        for k in range(1, m):
            reach = INFINITY
            for i in range(nv):
                if best[i] < reach:
                    reach = best[i]
                v = vals[i]
                if v >= l[k] and v <= h[k]:
                    best[i] = c[k] * v + reach
                else:
                    best[i] = INFINITY
        out = INFINITY
        for i in range(nv):
            if best[i] < out:
                out = best[i]
    return out
