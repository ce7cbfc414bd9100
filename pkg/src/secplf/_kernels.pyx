# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sliding-window kernels. Must agree bit-for-bit with _kernels_py."""

import numpy as np

cimport cython
from libc.stdint cimport int64_t


def window_min(const double[::1] d, Py_ssize_t T):
    """min(d[M-T..M]) for M = T..N-1 via a monotonic deque."""
    cdef Py_ssize_t n = d.shape[0], m, head = 0, tail = 0
    out = np.empty(max(n - T, 0), dtype=np.float64)
    cdef double[::1] o = out
    cdef int64_t[::1] q = np.empty(n, dtype=np.int64)
    with nogil:
        for m in range(n):
            while tail > head and d[q[tail - 1]] >= d[m]:
                tail -= 1
            q[tail] = m
            tail += 1
            if q[head] < m - T:
                head += 1
            if m >= T:
                o[m - T] = d[q[head]]
    return out


def max_delta(const double[::1] d, Py_ssize_t T, double eps):
    """d[M] - eps * min(d[M-T..M]) for M = T..N-1."""
    out = window_min(d, T)
    cdef double[::1] o = out
    cdef Py_ssize_t i, n = o.shape[0]
    with nogil:
        for i in range(n):
            o[i] = d[i + T] - eps * o[i]
    return out


def count_within(const double[::1] d, Py_ssize_t T, double eps):
    """Number of M in [T, N) with d[M] <= eps * min(d[M-T..M])."""
    cdef Py_ssize_t n = d.shape[0], m, head = 0, tail = 0
    cdef Py_ssize_t count = 0
    cdef double bound
    cdef int64_t[::1] q = np.empty(max(n, 1), dtype=np.int64)
    with nogil:
        for m in range(n):
            while tail > head and d[q[tail - 1]] >= d[m]:
                tail -= 1
            q[tail] = m
            tail += 1
            if q[head] < m - T:
                head += 1
            if m >= T:
                bound = eps * d[q[head]]
                if d[m] <= bound:
                    count += 1
    return count


def exceedance_lags(const double[::1] d, double eps):
    """For each M, the smallest window T with d[M] > eps * min(d[M-T..M]), or -1.

    Keeps a stack of indices whose scaled price is below every later scaled
    price; the nearest index with eps*d[j] < d[M] is always on it and found by
    binary search.
    """
    cdef Py_ssize_t n = d.shape[0], m, top = 0, lo, hi, mid
    cdef double x, a
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] lag = out
    cdef int64_t[::1] idx = np.empty(max(n, 1), dtype=np.int64)
    cdef double[::1] val = np.empty(max(n, 1), dtype=np.float64)
    with nogil:
        for m in range(n):
            x = d[m]
            # count stack entries with val < x (val is strictly increasing)
            lo = 0
            hi = top
            while lo < hi:
                mid = (lo + hi) >> 1
                if val[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            if lo == 0:
                lag[m] = -1
            else:
                lag[m] = m - idx[lo - 1]
            a = eps * x
            while top > 0 and val[top - 1] >= a:
                top -= 1
            idx[top] = m
            val[top] = a
            top += 1
    return out
