# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; see _fallback.py for the reference semantics."""
import numpy as np
from libc.math cimport asin, sqrt, M_PI


def iterated_sum(factors, widths):
    cdef double[:, :, ::1] f = np.ascontiguousarray(factors, dtype=np.float64)
    cdef double[::1] h = np.ascontiguousarray(widths, dtype=np.float64)
    cdef Py_ssize_t M = f.shape[0], T = f.shape[1], r = f.shape[2]
    out = np.empty(M)
    cdef double[::1] res = out
    cdef double[::1] P = np.empty(r + 1)
    cdef Py_ssize_t mi, i, k, m
    cdef double acc, prod, hi
    for mi in range(M):
        P[0] = 1.0
        for k in range(1, r + 1):
            P[k] = 0.0
        for i in range(T):
            hi = h[i]
            for k in range(r, 0, -1):
                acc = P[k]
                prod = 1.0
                for m in range(1, k + 1):
                    prod = prod * f[mi, i, k - m] * (hi / m)
                    acc = acc + P[k - m] * prod
                P[k] = acc
        res[mi] = P[r]
    return out


cdef inline void _cross(double* a, double* b, double* o) noexcept nogil:
    o[0] = a[1] * b[2] - a[2] * b[1]
    o[1] = a[2] * b[0] - a[0] * b[2]
    o[2] = a[0] * b[1] - a[1] * b[0]


cdef inline double _dot(double* a, double* b) noexcept nogil:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


cdef inline double _clip_asin(double x) noexcept nogil:
    if x > 1.0:
        x = 1.0
    elif x < -1.0:
        x = -1.0
    return asin(x)


cdef double _pair(double* p1, double* p2, double* p3, double* p4) noexcept nogil:
    cdef double r13[3]
    cdef double r14[3]
    cdef double r23[3]
    cdef double r24[3]
    cdef double n[4][3]
    cdef double d34[3]
    cdef double d12[3]
    cdef double c[3]
    cdef double nv, omega, s
    cdef int q, a
    for a in range(3):
        r13[a] = p3[a] - p1[a]
        r14[a] = p4[a] - p1[a]
        r23[a] = p3[a] - p2[a]
        r24[a] = p4[a] - p2[a]
        d34[a] = p4[a] - p3[a]
        d12[a] = p2[a] - p1[a]
    _cross(r13, r14, n[0])
    _cross(r14, r24, n[1])
    _cross(r24, r23, n[2])
    _cross(r23, r13, n[3])
    for q in range(4):
        nv = sqrt(_dot(n[q], n[q]))
        if nv < 1e-300:
            return 0.0
        for a in range(3):
            n[q][a] /= nv
    omega = 0.0
    for q in range(4):
        omega += _clip_asin(_dot(n[q], n[(q + 1) % 4]))
    _cross(d34, d12, c)
    s = _dot(c, r13)
    if s > 0:
        return omega
    if s < 0:
        return -omega
    return 0.0


def polygon_linking(A, B):
    cdef double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], i, j
    cdef double total = 0.0
    with nogil:
        for i in range(na):
            for j in range(nb):
                total += _pair(&a[i, 0], &a[(i + 1) % na, 0], &b[j, 0], &b[(j + 1) % nb, 0])
    return total / (4 * M_PI)
