#!/usr/bin/env python3
"""Benchmark the jit kernels against the numpy/scipy fallback.

Runs the two hot paths (the per-lambda scalar sweep and the tridiagonal
solve) through both backends and prints wall times plus speedups.  The
numbers justify the default backend choice; set FRACSTEP_NO_NUMBA=1 to make
the package run on the fallback permanently.
"""

import time

import numpy as np

from fracstep import _kernels
from fracstep.pade import pade_coefficients


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_scalar_sweep():
    r = pade_coefficients(2, 0.5)
    lams = np.logspace(0, 6, 1000)
    # a geometric run worth of steps: L=20, N=64
    L, N = 20, 64
    t_left, ks = [], []
    t_prev = 0.0
    for n in range(L + 1):
        t_next = 2.0 ** (n - L)
        k = (t_next - t_prev) / N
        for j in range(N):
            t_left.append(t_prev + j * k)
            ks.append(k)
        t_prev = t_next
    t_left = np.array(t_left)
    ks = np.array(ks)
    args = (lams, t_left, ks, r.p_coeffs, r.q_coeffs, 0.5, 0.5)
    rows = [("scalar_sweep (1000 lambdas x 1344 steps)",
             timeit(_kernels.scalar_sweep_numpy, *args),
             timeit(_kernels.scalar_sweep_numba, *args) if _kernels.NUMBA_ENABLED else None)]
    return rows


def bench_tridiag(n=999, solves=2000):
    rng = np.random.default_rng(0)
    d = 2.0 + rng.random(n)
    off = -0.9 * rng.random(n - 1)
    b = rng.standard_normal(n)

    def run(solver):
        for _ in range(solves):
            solver(off, d, off, b)

    rows = [(f"tridiag_solve ({solves} solves, n={n})",
             timeit(run, _kernels.tridiag_solve_numpy, repeats=3),
             timeit(run, _kernels.tridiag_solve_numba, repeats=3)
             if _kernels.NUMBA_ENABLED else None)]
    return rows


def main():
    _kernels.warmup()
    print(f"active backend: {_kernels.BACKEND}")
    print(f"{'kernel':<45} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, t_np, t_nb in bench_scalar_sweep() + bench_tridiag():
        if t_nb is None:
            print(f"{name:<45} {t_np * 1e3:9.2f}ms {'n/a':>10} {'n/a':>8}")
        else:
            print(f"{name:<45} {t_np * 1e3:9.2f}ms {t_nb * 1e3:9.2f}ms "
                  f"{t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
