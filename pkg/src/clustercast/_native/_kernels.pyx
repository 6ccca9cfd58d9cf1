# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: warping-distance dynamic programs and the Holt SSE grid.

The pure-python module `_fallback` implements the same functions with numpy.
Both are written so that corresponding operations happen in the same order on
the same doubles, which keeps results bit-identical across backends.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

INF = float("inf")


def dtw_full(double[:, ::1] a, double[:, ::1] b, bint squared=False):
    """Unconstrained warping distance between point sequences a (m,d) and b (n,d)."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t d = a.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double c, diff, best
    cdef double inf = INF

    prev_arr = np.empty(n, dtype=np.float64)
    cur_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] prev = prev_arr
    cdef double[::1] cur = cur_arr

    # first row: cumulative cost along b
    for j in range(n):
        c = 0.0
        for k in range(d):
            diff = a[0, k] - b[j, k]
            if squared:
                c += diff * diff
            else:
                c += diff if diff >= 0 else -diff
        if j == 0:
            cur[0] = c
        else:
            cur[j] = cur[j - 1] + c
    prev, cur = cur, prev

    for i in range(1, m):
        for j in range(n):
            c = 0.0
            for k in range(d):
                diff = a[i, k] - b[j, k]
                if squared:
                    c += diff * diff
                else:
                    c += diff if diff >= 0 else -diff
            if j == 0:
                best = prev[0]
            else:
                best = prev[j]
                if prev[j - 1] < best:
                    best = prev[j - 1]
                if cur[j - 1] < best:
                    best = cur[j - 1]
            cur[j] = c + best
        prev, cur = cur, prev

    return prev[n - 1]


def dtw_banded(double[:, ::1] a, double[:, ::1] b,
               cnp.int64_t[::1] lo, cnp.int64_t[::1] hi, bint squared=False):
    """Warping distance restricted to per-row column bands [lo[i], hi[i]].

    Bands must contain (0,0) and (m-1,n-1) and overlap row to row so the end
    cell stays reachable; the caller computes them.
    """
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t d = a.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double c, diff, best
    cdef double inf = INF

    prev_arr = np.full(n, inf, dtype=np.float64)
    cur_arr = np.full(n, inf, dtype=np.float64)
    cdef double[::1] prev = prev_arr
    cdef double[::1] cur = cur_arr

    for j in range(lo[0], hi[0] + 1):
        c = 0.0
        for k in range(d):
            diff = a[0, k] - b[j, k]
            if squared:
                c += diff * diff
            else:
                c += diff if diff >= 0 else -diff
        if j == 0:
            cur[0] = c
        else:
            cur[j] = cur[j - 1] + c

    for i in range(1, m):
        prev, cur = cur, prev
        for j in range(n):
            cur[j] = inf
        for j in range(lo[i], hi[i] + 1):
            c = 0.0
            for k in range(d):
                diff = a[i, k] - b[j, k]
                if squared:
                    c += diff * diff
                else:
                    c += diff if diff >= 0 else -diff
            best = prev[j]
            if j > 0:
                if prev[j - 1] < best:
                    best = prev[j - 1]
                if cur[j - 1] < best:
                    best = cur[j - 1]
            cur[j] = c + best

    return cur[n - 1]


def holt_sse_grid(double[::1] x, double[::1] alphas, double[::1] betas):
    """One-step-ahead squared-error totals of Holt's linear smoothing.

    Returns a (len(alphas), len(betas)) matrix of SSE values. Level starts at
    x[0], trend at x[1] - x[0], and predictions are scored from t = 1 onward.
    """
    cdef Py_ssize_t n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two values")
    cdef Py_ssize_t na = alphas.shape[0]
    cdef Py_ssize_t nb = betas.shape[0]
    cdef Py_ssize_t g = na * nb
    cdef Py_ssize_t ia, ib, t, idx

    lvl_arr = np.empty(g, dtype=np.float64)
    trd_arr = np.empty(g, dtype=np.float64)
    sse_arr = np.zeros(g, dtype=np.float64)
    av_arr = np.empty(g, dtype=np.float64)
    bv_arr = np.empty(g, dtype=np.float64)
    cdef double[::1] lvl = lvl_arr
    cdef double[::1] trd = trd_arr
    cdef double[::1] sse = sse_arr
    cdef double[::1] av = av_arr
    cdef double[::1] bv = bv_arr
    cdef double x0 = x[0]
    cdef double d0 = x[1] - x[0]
    cdef double xt, pred, e, lnew

    idx = 0
    for ia in range(na):
        for ib in range(nb):
            av[idx] = alphas[ia]
            bv[idx] = betas[ib]
            lvl[idx] = x0
            trd[idx] = d0
            idx += 1

    # time outside, grid inside: the inner loop has no cross-iteration
    # dependency and vectorizes
    for t in range(1, n):
        xt = x[t]
        for idx in range(g):
            pred = lvl[idx] + trd[idx]
            e = xt - pred
            sse[idx] += e * e
            lnew = av[idx] * xt + (1.0 - av[idx]) * pred
            trd[idx] = bv[idx] * (lnew - lvl[idx]) + (1.0 - bv[idx]) * trd[idx]
            lvl[idx] = lnew

    return sse_arr.reshape(na, nb)
