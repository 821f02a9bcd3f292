"""Pure-numpy red-black SOR kernel; same ordering and arithmetic as ``_sor.pyx``."""

import numpy as np


def _residual(v, f, h2, diag):
    c = v[1:-1, 1:-1]
    return f[1:-1, 1:-1] * h2 + ((v[:-2, 1:-1] + v[2:, 1:-1]) + (v[1:-1, :-2] + v[1:-1, 2:])) - diag * c


def residual_norm(v, f, h, tau):
    h2 = h * h
    r = _residual(v, f, h2, 4.0 + tau * h2)
    return float(np.sqrt(np.sum(r * r)))


def _update(v, f, h2, diag, omega, i0, j0):
    # nodes (i0::2, j0::2) inside the interior
    n = v.shape[0] - 1
    c = v[i0:n:2, j0:n:2]
    s = (v[i0 - 1:n - 1:2, j0:n:2] + v[i0 + 1:n + 1:2, j0:n:2]) + (
        v[i0:n:2, j0 - 1:n - 1:2] + v[i0:n:2, j0 + 1:n + 1:2]
    )
    gs = (f[i0:n:2, j0:n:2] * h2 + s) / diag
    c += omega * (gs - c)


def sor_solve(v, f, h, tau, omega, rhs_norm, tol, max_sweeps):
    h2 = h * h
    diag = 4.0 + tau * h2
    k = 0
    res = residual_norm(v, f, h, tau) / rhs_norm
    while res > tol and k < max_sweeps:
        _update(v, f, h2, diag, omega, 1, 1)
        _update(v, f, h2, diag, omega, 2, 2)
        _update(v, f, h2, diag, omega, 1, 2)
        _update(v, f, h2, diag, omega, 2, 1)
        k += 1
        res = residual_norm(v, f, h, tau) / rhs_norm
    return k, res
