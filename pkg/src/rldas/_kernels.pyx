# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Semantics must match ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def pairwise_stats(const double[:, ::1] X):
    """Return (mean, max) Euclidean distance over all unordered pairs."""
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, diff, dist, total = 0.0, best = 0.0
    if n < 2:
        return 0.0, 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                diff = X[i, k] - X[j, k]
                acc += diff * diff
            dist = sqrt(acc)
            total += dist
            if dist > best:
                best = dist
    return total / (n * (n - 1) / 2.0), best


def crowding_replace(double[:, ::1] X, double[::1] cost, double[::1] F, double[::1] Cr,
                     const double[:, ::1] U, const double[::1] cu,
                     const double[::1] Fu, const double[::1] Cru):
    """Sequential crowding selection, in place.

    Each trial competes with its nearest (squared Euclidean, first index on
    ties) member of the current population. Returns the replaced index per
    trial, or -1.
    """
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], m = U.shape[0]
    cdef Py_ssize_t i, j, k, arg
    cdef double acc, diff, low
    targets = np.full(m, -1, dtype=np.int64)
    cdef long long[::1] t = targets
    for i in range(m):
        arg = 0
        low = -1.0
        for j in range(n):
            acc = 0.0
            for k in range(d):
                diff = X[j, k] - U[i, k]
                acc += diff * diff
            if low < 0.0 or acc < low:
                low = acc
                arg = j
        if cu[i] < cost[arg]:
            for k in range(d):
                X[arg, k] = U[i, k]
            cost[arg] = cu[i]
            F[arg] = Fu[i]
            Cr[arg] = Cru[i]
            t[i] = arg
    return targets
