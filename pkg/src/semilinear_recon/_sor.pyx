# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled red-black SOR kernel for the 5-point (reaction-)Laplacian."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef double _residual_norm(double[:, ::1] v, const double[:, ::1] f,
                           double h2, double diag) noexcept nogil:
    # sqrt(sum r^2) with r = f - A v, scaled by h^2
    cdef Py_ssize_t n = v.shape[0] - 1
    cdef Py_ssize_t i, j
    cdef double r, acc = 0.0
    for i in range(1, n):
        for j in range(1, n):
            r = f[i, j] * h2 + ((v[i - 1, j] + v[i + 1, j]) + (v[i, j - 1] + v[i, j + 1])) - diag * v[i, j]
            acc += r * r
    return sqrt(acc)


cdef void _color_sweep(double[:, ::1] v, const double[:, ::1] f, double h2,
                       double diag, double omega, int color) noexcept nogil:
    cdef Py_ssize_t n = v.shape[0] - 1
    cdef Py_ssize_t i, j, j0
    cdef double s, gs
    for i in range(1, n):
        j0 = 1 if ((i + 1) % 2 == color) else 2
        for j in range(j0, n, 2):
            s = (v[i - 1, j] + v[i + 1, j]) + (v[i, j - 1] + v[i, j + 1])
            gs = (f[i, j] * h2 + s) / diag
            v[i, j] = v[i, j] + omega * (gs - v[i, j])


def sor_solve(double[:, ::1] v, const double[:, ::1] f, double h, double tau,
              double omega, double rhs_norm, double tol, long max_sweeps):
    """Run red-black SOR sweeps in place on ``v``.

    Returns ``(sweeps, relative_residual)``.
    """
    cdef double h2 = h * h
    cdef double diag = 4.0 + tau * h2
    cdef long k = 0
    cdef double res
    with nogil:
        res = _residual_norm(v, f, h2, diag) / rhs_norm
        while res > tol and k < max_sweeps:
            _color_sweep(v, f, h2, diag, omega, 0)
            _color_sweep(v, f, h2, diag, omega, 1)
            k += 1
            res = _residual_norm(v, f, h2, diag) / rhs_norm
    return k, res


def residual_norm(double[:, ::1] v, const double[:, ::1] f, double h, double tau):
    cdef double h2 = h * h
    return _residual_norm(v, f, h2, 4.0 + tau * h2)
