"""Benchmark the numba kernel backend against the pure-numpy fallback.

Times each kernel on solver-sized inputs, then full solves (a scalar table
run and a sparse-recovery instance) under each backend. Run with

    python benchmarks/bench_kernels.py

Backend selection for normal use is via the QVI_PURE_NUMPY environment
variable; here both backends are exercised in-process through
qvi.kernels.use_backend.
"""

import time

import numpy as np

from qvi import (
    SolverConfig,
    SquaredStep,
    cubic_problem,
    gen_recovery,
    run_recovery,
    solve,
)
from qvi import kernels


def _time(fn, repeats=200):
    fn()  # warmup (numba compiles here)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(n=1024, m=512, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    lo = np.full(n, -1.0)
    hi = np.full(n, 1.0)
    anchor = rng.standard_normal(n)
    mat = rng.standard_normal((m, n))
    mat_t = np.ascontiguousarray(mat.T)
    rhs = rng.standard_normal(m)
    u = rng.standard_normal(n)
    z = rng.standard_normal(n)
    fu = rng.standard_normal(n)
    fz = rng.standard_normal(n)

    cases = {
        "box_project": lambda impl: impl(x, lo, hi),
        "relaxed_l1_project": lambda impl: impl(x, anchor, 5.0),
        "least_squares_grad": lambda impl: impl(mat, mat_t, rhs, x),
        "correction_and_norms": lambda impl: impl(u, z, fu, fz, 0.1),
    }
    print(f"kernel micro-benchmarks (n={n}, m={m}); best of 200, microseconds")
    print(f"{'kernel':24s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, call in cases.items():
        per_backend = {}
        for backend in kernels.AVAILABLE_BACKENDS:
            impl = kernels._BACKENDS[backend][name]
            per_backend[backend] = _time(lambda: call(impl))
        np_t = per_backend["numpy"] * 1e6
        if "numba" in per_backend:
            nb_t = per_backend["numba"] * 1e6
            print(f"{name:24s} {np_t:10.2f} {nb_t:10.2f} {np_t / nb_t:7.2f}x")
        else:
            print(f"{name:24s} {np_t:10.2f} {'-':>10s} {'-':>8s}")


def bench_solves(seed=0):
    print("\nend-to-end solves; wall seconds per backend")
    f, box = cubic_problem()
    cfg = SolverConfig(stop=SquaredStep(1e-16), max_iters=500)
    instance = gen_recovery(256, 512, 20, seed=seed)
    workloads = {
        "scalar table run (5 starts)": lambda: [
            solve(f, box, u1, cfg) for u1 in (0.6, 0.9, 2.0, 3.0, -3.0)
        ],
        "recovery 256x512 K=20": lambda: run_recovery(instance),
    }
    active = kernels.ACTIVE_BACKEND
    try:
        for label, work in workloads.items():
            row = {}
            for backend in kernels.AVAILABLE_BACKENDS:
                kernels.use_backend(backend)
                work()  # warmup
                t0 = time.perf_counter()
                work()
                row[backend] = time.perf_counter() - t0
            np_t = row["numpy"]
            if "numba" in row:
                print(
                    f"{label:32s} numpy {np_t:8.4f}s  numba {row['numba']:8.4f}s  "
                    f"speedup {np_t / row['numba']:5.2f}x"
                )
            else:
                print(f"{label:32s} numpy {np_t:8.4f}s  (numba unavailable)")
    finally:
        kernels.use_backend(active)


if __name__ == "__main__":
    bench_kernels()
    bench_solves()
