# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled log-space elementary-symmetric-polynomial kernels.

Same contract as kernels._esp_py; the recurrences run as plain C loops.
"""

from libc.math cimport exp, log1p, INFINITY

import numpy as np


cdef inline double lae(double a, double b) noexcept nogil:
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    if a >= b:
        return a + log1p(exp(b - a))
    return b + log1p(exp(a - b))


def log_esp(log_x, int d_max):
    """log elementary symmetric polynomials e_0..e_d_max of exp(log_x)."""
    squeeze = log_x.ndim == 1
    arr = np.ascontiguousarray(np.atleast_2d(log_x), dtype=np.float64)
    cdef Py_ssize_t n_rows = arr.shape[0]
    cdef Py_ssize_t p = arr.shape[1]
    if not 0 <= d_max <= p:
        raise ValueError(f"degree {d_max} out of range for {p} inputs")
    out = np.full((n_rows, d_max + 1), -np.inf)
    work = np.empty(d_max + 1)
    cdef double[:, ::1] x = arr
    cdef double[:, ::1] res = out
    cdef double[::1] e = work
    cdef Py_ssize_t b, j, d, top
    with nogil:
        for b in range(n_rows):
            e[0] = 0.0
            for d in range(1, d_max + 1):
                e[d] = -INFINITY
            for j in range(p):
                top = d_max if d_max < j + 1 else j + 1
                for d in range(top, 0, -1):
                    e[d] = lae(e[d], x[b, j] + e[d - 1])
            for d in range(d_max + 1):
                res[b, d] = e[d]
    return out[0] if squeeze else out


def log_esp_with_loo(log_x, int d):
    """log e_d over full rows plus leave-one-out log e_{d-1} per entry."""
    squeeze = log_x.ndim == 1
    arr = np.ascontiguousarray(np.atleast_2d(log_x), dtype=np.float64)
    cdef Py_ssize_t n_rows = arr.shape[0]
    cdef Py_ssize_t p = arr.shape[1]
    if not 1 <= d <= p:
        raise ValueError(f"degree {d} out of range for {p} inputs")
    total = np.empty(n_rows)
    loo = np.empty((n_rows, p))
    fwd_buf = np.empty((p + 1, d))
    bwd_buf = np.empty((p + 1, d))
    cdef double[:, ::1] x = arr
    cdef double[::1] tot = total
    cdef double[:, ::1] out = loo
    cdef double[:, ::1] fwd = fwd_buf
    cdef double[:, ::1] bwd = bwd_buf
    cdef Py_ssize_t b, j, k
    cdef double acc
    with nogil:
        for b in range(n_rows):
            # fwd[j, k] = log e_k over entries 0..j-1 (degrees 0..d-1)
            fwd[0, 0] = 0.0
            for k in range(1, d):
                fwd[0, k] = -INFINITY
            for j in range(1, p + 1):
                fwd[j, 0] = 0.0
                for k in range(1, d):
                    fwd[j, k] = lae(fwd[j - 1, k], x[b, j - 1] + fwd[j - 1, k - 1])
            # bwd[j, k] = log e_k over entries j..p-1
            bwd[p, 0] = 0.0
            for k in range(1, d):
                bwd[p, k] = -INFINITY
            for j in range(p - 1, -1, -1):
                bwd[j, 0] = 0.0
                for k in range(1, d):
                    bwd[j, k] = lae(bwd[j + 1, k], x[b, j] + bwd[j + 1, k - 1])
            acc = -INFINITY
            for j in range(1, p + 1):
                acc = lae(acc, x[b, j - 1] + fwd[j - 1, d - 1])
            tot[b] = acc
            for j in range(p):
                acc = -INFINITY
                for k in range(d):
                    acc = lae(acc, fwd[j, k] + bwd[j + 1, d - 1 - k])
                out[b, j] = acc
    if squeeze:
        return total[0], loo[0]
    return total, loo
