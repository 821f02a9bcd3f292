"""Compare the compiled and numpy SOR kernels.

    python benchmarks/bench_sor.py [--sizes 32 64 128] [--repeat 5]

Solves -Lap u = 1 with boundary values y from a zero interior guess and reports
the best wall-clock time per solve and the speed-up of the compiled kernel.
"""

import argparse
import math
import time

import numpy as np

from semilinear_recon import _sor_py

try:
    from semilinear_recon import _sor
except ImportError:
    _sor = None


def _problem(n):
    h = 1.0 / n
    v = np.zeros((n + 1, n + 1))
    v[:, :] = np.linspace(0.0, 1.0, n + 1)[None, :]
    v[1:-1, 1:-1] = 0.0
    f = np.ones_like(v)
    omega = 2.0 / (1.0 + math.sin(math.pi * h))
    rhs = _sor_py.residual_norm(v, f, h, 0.0)
    return v, f, h, omega, rhs


def time_solve(kernel, n, repeat):
    best, sweeps = math.inf, 0
    for _ in range(repeat):
        v, f, h, omega, rhs = _problem(n)
        t0 = time.perf_counter()
        sweeps, _ = kernel.sor_solve(v, f, h, 0.0, omega, rhs, 1e-10, 100 * n * n)
        best = min(best, time.perf_counter() - t0)
    return best, sweeps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'n':>5} {'sweeps':>7} {'numpy ms':>10} {'cython ms':>10} {'speed-up':>9}")
    for n in args.sizes:
        t_py, sweeps = time_solve(_sor_py, n, args.repeat)
        if _sor is None:
            print(f"{n:>5} {sweeps:>7} {1e3 * t_py:>10.2f} {'n/a':>10} {'n/a':>9}")
            continue
        t_cy, _ = time_solve(_sor, n, args.repeat)
        print(f"{n:>5} {sweeps:>7} {1e3 * t_py:>10.2f} {1e3 * t_cy:>10.2f} {t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
