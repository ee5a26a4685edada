# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: generator assembly, 8×8 LU solves and the RK4 loop.

Same signatures and results as ``_kernels_py``; all loops run without the GIL
so callers may split a δ₂ grid across threads.
"""

import numpy as np
from libc.math cimport fabs, NAN

NAME = "cython"

cdef enum:
    N = 8


cdef void _assemble(double g1, double nu, double gl, double e1, double e2,
                    double d1, double d2, double* A, double* c) noexcept nogil:
    cdef int i
    cdef double g13 = g1 + gl
    cdef double g12 = g1 + nu
    cdef double g23 = nu + gl
    cdef double diff = d1 - d2
    for i in range(N * N):
        A[i] = 0.0
    for i in range(N):
        c[i] = 0.0
    A[0 * N + 0] = -2.0 * g1
    A[0 * N + 5] = 2.0 * e1
    A[1 * N + 1] = -2.0 * nu
    A[1 * N + 7] = 2.0 * e2
    A[2 * N + 2] = -g12
    A[2 * N + 3] = diff
    A[2 * N + 5] = e2
    A[2 * N + 7] = e1
    A[3 * N + 2] = -diff
    A[3 * N + 3] = -g12
    A[3 * N + 4] = -e2
    A[3 * N + 6] = e1
    A[4 * N + 3] = e2
    A[4 * N + 4] = -g13
    A[4 * N + 5] = d1
    A[5 * N + 0] = -2.0 * e1
    A[5 * N + 1] = -e1
    A[5 * N + 2] = -e2
    A[5 * N + 4] = -d1
    A[5 * N + 5] = -g13
    c[5] = e1
    A[6 * N + 3] = -e1
    A[6 * N + 6] = -g23
    A[6 * N + 7] = d2
    A[7 * N + 0] = -e2
    A[7 * N + 1] = -2.0 * e2
    A[7 * N + 2] = -e1
    A[7 * N + 6] = -d2
    A[7 * N + 7] = -g23
    c[7] = e2


cdef int _lu(double* a, int* piv) noexcept nogil:
    """In-place partial-pivot LU; returns 1 on an exactly zero pivot."""
    cdef int i, j, k, p
    cdef double amax, t
    for k in range(N):
        p = k
        amax = fabs(a[k * N + k])
        for i in range(k + 1, N):
            t = fabs(a[i * N + k])
            if t > amax:
                amax = t
                p = i
        piv[k] = p
        if amax == 0.0:
            return 1
        if p != k:
            for j in range(N):
                t = a[k * N + j]
                a[k * N + j] = a[p * N + j]
                a[p * N + j] = t
        for i in range(k + 1, N):
            a[i * N + k] /= a[k * N + k]
            t = a[i * N + k]
            for j in range(k + 1, N):
                a[i * N + j] -= t * a[k * N + j]
    return 0


cdef void _lu_solve(const double* lu, const int* piv, double* b) noexcept nogil:
    cdef int i, j
    cdef double t
    for i in range(N):
        if piv[i] != i:
            t = b[i]
            b[i] = b[piv[i]]
            b[piv[i]] = t
    for i in range(1, N):
        for j in range(i):
            b[i] -= lu[i * N + j] * b[j]
    for i in range(N - 1, -1, -1):
        for j in range(i + 1, N):
            b[i] -= lu[i * N + j] * b[j]
        b[i] /= lu[i * N + i]


cdef double _solve_one(const double* A, const double* c, double* x) noexcept nogil:
    """x = -A⁻¹c with one refinement step; returns rcond (0 if singular)."""
    cdef double lu[N * N]
    cdef double r[N]
    cdef double col[N]
    cdef int piv[N]
    cdef int i, j
    cdef double s, norm_a = 0.0, norm_inv = 0.0
    for i in range(N * N):
        lu[i] = A[i]
    if _lu(lu, piv):
        for i in range(N):
            x[i] = NAN
        return 0.0
    for i in range(N):
        x[i] = -c[i]
    _lu_solve(lu, piv, x)
    for i in range(N):
        s = c[i]
        for j in range(N):
            s += A[i * N + j] * x[j]
        r[i] = s
    _lu_solve(lu, piv, r)
    for i in range(N):
        x[i] -= r[i]
    for j in range(N):
        s = 0.0
        for i in range(N):
            s += fabs(A[i * N + j])
        if s > norm_a:
            norm_a = s
        for i in range(N):
            col[i] = 1.0 if i == j else 0.0
        _lu_solve(lu, piv, col)
        s = 0.0
        for i in range(N):
            s += fabs(col[i])
        if s > norm_inv:
            norm_inv = s
    return 1.0 / (norm_a * norm_inv)


def assemble(double gamma1, double nu, double gamma_l, double eps1, double eps2,
             double delta1, delta2):
    cdef const double[::1] d2 = np.ascontiguousarray(np.atleast_1d(delta2), dtype=float)
    cdef Py_ssize_t n = d2.shape[0], k
    A_arr = np.empty((n, N, N))
    c_arr = np.empty(N)
    cdef double[:, :, ::1] A = A_arr
    cdef double[::1] c = c_arr
    with nogil:
        for k in range(n):
            _assemble(gamma1, nu, gamma_l, eps1, eps2, delta1, d2[k], &A[k, 0, 0], &c[0])
    return A_arr, c_arr


def solve_batch(A_in, c_in):
    cdef const double[:, :, ::1] A = np.ascontiguousarray(A_in, dtype=float)
    cdef Py_ssize_t n = A.shape[0], k
    cdef const double[:, ::1] c = np.ascontiguousarray(
        np.broadcast_to(np.asarray(c_in, dtype=float), (n, N)))
    x_arr = np.empty((n, N))
    rc_arr = np.empty(n)
    cdef double[:, ::1] x = x_arr
    cdef double[::1] rc = rc_arr
    with nogil:
        for k in range(n):
            rc[k] = _solve_one(&A[k, 0, 0], &c[k, 0], &x[k, 0])
    return x_arr, rc_arr


def steady_scan(double gamma1, double nu, double gamma_l, double eps1, double eps2,
                double delta1, delta2):
    cdef const double[::1] d2 = np.ascontiguousarray(np.atleast_1d(delta2), dtype=float)
    cdef Py_ssize_t n = d2.shape[0], k
    x_arr = np.empty((n, N))
    rc_arr = np.empty(n)
    cdef double[:, ::1] x = x_arr
    cdef double[::1] rc = rc_arr
    cdef double A[N * N]
    cdef double c[N]
    with nogil:
        for k in range(n):
            _assemble(gamma1, nu, gamma_l, eps1, eps2, delta1, d2[k], A, c)
            rc[k] = _solve_one(A, c, &x[k, 0])
    return x_arr, rc_arr


def rk4(A_in, c_in, X0, double dt, long nsteps, double bound):
    cdef const double[:, ::1] A = np.ascontiguousarray(A_in, dtype=float)
    cdef const double[::1] c = np.ascontiguousarray(c_in, dtype=float)
    X_arr = np.array(X0, dtype=float, order="C", copy=True, ndmin=2)
    cdef double[:, ::1] X = X_arr
    cdef Py_ssize_t m = X.shape[0], s, i, j
    cdef long step
    cdef double k1[N]
    cdef double k2[N]
    cdef double k3[N]
    cdef double k4[N]
    cdef double y[N]
    cdef double acc, h2 = 0.5 * dt, h6 = dt / 6.0
    cdef long failed = -1
    with nogil:
        for step in range(nsteps):
            for s in range(m):
                for i in range(N):
                    acc = c[i]
                    for j in range(N):
                        acc = acc + A[i, j] * X[s, j]
                    k1[i] = acc
                for i in range(N):
                    y[i] = X[s, i] + h2 * k1[i]
                for i in range(N):
                    acc = c[i]
                    for j in range(N):
                        acc = acc + A[i, j] * y[j]
                    k2[i] = acc
                for i in range(N):
                    y[i] = X[s, i] + h2 * k2[i]
                for i in range(N):
                    acc = c[i]
                    for j in range(N):
                        acc = acc + A[i, j] * y[j]
                    k3[i] = acc
                for i in range(N):
                    y[i] = X[s, i] + dt * k3[i]
                for i in range(N):
                    acc = c[i]
                    for j in range(N):
                        acc = acc + A[i, j] * y[j]
                    k4[i] = acc
                for i in range(N):
                    X[s, i] = X[s, i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                    if fabs(X[s, i]) > bound:
                        failed = step
            if failed >= 0:
                break
    return X_arr, failed
