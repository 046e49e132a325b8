# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos as c_cos, sin as c_sin, fmod, sqrt, INFINITY

cnp.import_array()

cdef double TWO_PI = 6.283185307179586


cdef inline double _reduce(double t) nogil:
    cdef double r = fmod(t, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r


def reduce_angle(t):
    cdef cnp.ndarray[double, ndim=1] tt = np.ascontiguousarray(np.ravel(t), dtype=np.float64)
    cdef Py_ssize_t n = tt.shape[0], i
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = _reduce(tt[i])
    return out.reshape(np.shape(t))


def trig_eval(a0, cos, sin, t):
    cdef const double[::1] A0 = np.ascontiguousarray(a0, dtype=np.float64)
    cdef const double[:, ::1] C = np.ascontiguousarray(cos, dtype=np.float64)
    cdef const double[:, ::1] S = np.ascontiguousarray(sin, dtype=np.float64)
    cdef const double[::1] T = np.ascontiguousarray(np.ravel(t), dtype=np.float64)
    cdef Py_ssize_t m = C.shape[0], N = C.shape[1], n = T.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double r, c1, s1, ck, sk, tmp
    out = np.empty((m, n))
    cdef double[:, ::1] O = out
    with nogil:
        for j in range(m):
            for i in range(n):
                O[j, i] = A0[j]
        for i in range(n):
            r = _reduce(T[i])
            c1 = c_cos(r)
            s1 = c_sin(r)
            ck = c1
            sk = s1
            for k in range(N):
                if k:
                    tmp = ck * c1 - sk * s1
                    sk = sk * c1 + ck * s1
                    ck = tmp
                for j in range(m):
                    O[j, i] += C[j, k] * ck + S[j, k] * sk
    return out


def defect_grid_min(tau, band):
    cdef const double[:, ::1] P = np.ascontiguousarray(tau, dtype=np.float64)
    cdef Py_ssize_t M = P.shape[0], i, j, d
    cdef Py_ssize_t b = max(int(band), 1)
    cdef double best = INFINITY, cx, cy, cz, f
    cdef Py_ssize_t bi = -1, bj = -1
    with nogil:
        for i in range(M):
            for j in range(M):
                d = i - j if i > j else j - i
                if M - d < d:
                    d = M - d
                if d < b:
                    continue
                cx = P[i, 1] * P[j, 2] - P[i, 2] * P[j, 1]
                cy = P[i, 2] * P[j, 0] - P[i, 0] * P[j, 2]
                cz = P[i, 0] * P[j, 1] - P[i, 1] * P[j, 0]
                f = sqrt(cx * cx + cy * cy + cz * cz)
                if f < best:
                    best = f
                    bi = i
                    bj = j
    return best, int(bi), int(bj)


cdef inline double _dot(const double[:, ::1] X, Py_ssize_t i, double* y) nogil:
    return X[i, 0] * y[0] + X[i, 1] * y[1] + X[i, 2] * y[2]


def sphere_polyline_crossing(P):
    cdef const double[:, ::1] A = np.ascontiguousarray(P, dtype=np.float64)
    cdef Py_ssize_t M = A.shape[0], i, j, i1, j1, d
    cdef double n1[3]
    cdef double n2[3]
    cdef double sa, sb, sc, sd, mm
    cdef Py_ssize_t hi = -1, hj = -1
    with nogil:
        for i in range(M):
            i1 = (i + 1) % M
            n1[0] = A[i, 1] * A[i1, 2] - A[i, 2] * A[i1, 1]
            n1[1] = A[i, 2] * A[i1, 0] - A[i, 0] * A[i1, 2]
            n1[2] = A[i, 0] * A[i1, 1] - A[i, 1] * A[i1, 0]
            for j in range(M):
                d = i - j if i > j else j - i
                if M - d < d:
                    d = M - d
                if d < 2:
                    continue
                j1 = (j + 1) % M
                sa = _dot(A, j, n1)
                sb = _dot(A, j1, n1)
                if sa * sb >= 0.0:
                    continue
                n2[0] = A[j, 1] * A[j1, 2] - A[j, 2] * A[j1, 1]
                n2[1] = A[j, 2] * A[j1, 0] - A[j, 0] * A[j1, 2]
                n2[2] = A[j, 0] * A[j1, 1] - A[j, 1] * A[j1, 0]
                sc = _dot(A, i, n2)
                sd = _dot(A, i1, n2)
                if sc * sd >= 0.0:
                    continue
                mm = ((A[i, 0] + A[i1, 0]) * (A[j, 0] + A[j1, 0])
                      + (A[i, 1] + A[i1, 1]) * (A[j, 1] + A[j1, 1])
                      + (A[i, 2] + A[i1, 2]) * (A[j, 2] + A[j1, 2]))
                if mm > 0.0:
                    hi = i
                    hj = j
                    break
            if hi >= 0:
                break
    return int(hi), int(hj)
