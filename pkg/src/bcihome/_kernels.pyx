# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the signal-processing kernels."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def autocorr_biased(const double[::1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t lag, t, m, m4
    cdef double a0, a1, a2, a3
    cdef const double* p = &x[0]
    cdef const double* q
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] r = out
    for lag in range(n):
        # four independent partial sums let the compiler pipeline the multiply-adds
        q = p + lag
        m = n - lag
        m4 = m - m % 4
        a0 = a1 = a2 = a3 = 0.0
        for t in range(0, m4, 4):
            a0 += p[t] * q[t]
            a1 += p[t + 1] * q[t + 1]
            a2 += p[t + 2] * q[t + 2]
            a3 += p[t + 3] * q[t + 3]
        for t in range(m4, m):
            a0 += p[t] * q[t]
        r[lag] = ((a0 + a1) + (a2 + a3)) / n
    return out


def lfilter(const double[::1] b, const double[::1] a, const double[::1] x):
    # transposed direct form II; a[0] must already be 1
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t order = max(nb, na) - 1
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, k
    cdef double xi, yi
    bp = np.zeros(order + 1, dtype=np.float64)
    ap = np.zeros(order + 1, dtype=np.float64)
    bp[:nb] = b
    ap[:na] = a
    cdef double[::1] bb = bp
    cdef double[::1] aa = ap
    state = np.zeros(order + 1, dtype=np.float64)
    cdef double[::1] z = state
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    for i in range(n):
        xi = x[i]
        yi = bb[0] * xi + z[0]
        for k in range(order - 1):
            z[k] = bb[k + 1] * xi + z[k + 1] - aa[k + 1] * yi
        if order > 0:
            z[order - 1] = bb[order] * xi - aa[order] * yi
        y[i] = yi
    return out


def above_runs(const double[::1] x, double threshold):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, count = 0
    cdef bint inside = False
    starts = np.empty(n // 2 + 1, dtype=np.intp)
    ends = np.empty(n // 2 + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] s = starts
    cdef Py_ssize_t[::1] e = ends
    for i in range(n):
        if x[i] > threshold:
            if not inside:
                s[count] = i
                inside = True
        elif inside:
            e[count] = i - 1
            count += 1
            inside = False
    if inside:
        e[count] = n - 1
        count += 1
    return starts[:count].copy(), ends[:count].copy()
