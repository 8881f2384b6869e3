#!/usr/bin/env python3
"""Benchmark the numba-compiled hot kernels against their numpy fallbacks.

Run without RESTORE_NO_NUMBA so both paths are available:

    python3 benchmarks/bench_kernels.py

The same kernels run with RESTORE_NO_NUMBA=1 anywhere numba is unavailable;
this script reports what that costs.
"""
import time

import numpy as np

from restore import _accel
from restore.graph import gen_synthetic
from restore.linalg import _jacobi_sweeps_loop, _jacobi_sweeps_numpy
from restore.randomwalk import (
    SgnsParams,
    _sgns_epoch_loop,
    _sgns_epoch_numpy,
    _walk_steps_loop,
    _walk_steps_numpy,
    corpus_pairs,
    generate_walks,
    _noise_distribution,
)


def timeit(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_jacobi(compiled):
    print("\njacobi eigensolver sweeps (symmetric eigendecomposition)")
    rng = np.random.default_rng(0)
    for n in (16, 32, 64, 96):
        m = rng.standard_normal((n, n))
        a = (m + m.T) / 2.0
        tol = 1e-14 * float(np.linalg.norm(a))

        def run(kernel):
            work = a.copy()
            vecs = np.eye(n)
            kernel(work, vecs, tol, 64)

        t_np = timeit(run, _jacobi_sweeps_numpy)
        t_jit = timeit(run, compiled["jacobi"])
        print(f"  n={n:3d}: numpy {t_np * 1e3:8.2f} ms   numba {t_jit * 1e3:8.2f} ms   "
              f"speedup {t_np / t_jit:6.1f}x")


def bench_walks(compiled):
    print("\nbiased random-walk stepping (walk generation)")
    g = gen_synthetic("scale_free", 2000, seed=5)
    rng = np.random.default_rng(1)
    walk_length = 80
    starts = rng.integers(0, g.node_count, size=400)
    uniform_rows = rng.random((starts.shape[0], walk_length - 1))

    def run(kernel, p, q):
        buf = np.zeros(walk_length, dtype=np.int64)
        for i, s in enumerate(starts):
            kernel(g.out_indptr, g.out_indices, g.in_indptr, g.in_indices,
                   int(s), p, q, uniform_rows[i], buf)

    for p, q, tag in ((1.0, 1.0, "uniform"), (0.5, 2.0, "biased ")):
        t_np = timeit(run, _walk_steps_numpy, p, q)
        t_jit = timeit(run, compiled["walk"], p, q)
        print(f"  {tag} (400 walks x {walk_length}): numpy {t_np * 1e3:8.2f} ms   "
              f"numba {t_jit * 1e3:8.2f} ms   speedup {t_np / t_jit:6.1f}x")


def bench_sgns(compiled):
    print("\nskip-gram negative-sampling epoch (embedding training)")
    g = gen_synthetic("scale_free", 300, seed=7)
    corpus = generate_walks(g, 20, 2, 1.0, 1.0, seed=3)
    centers, contexts = corpus_pairs(corpus, 5)
    params = SgnsParams(context_size=5, negatives_per_positive=5, epochs=1, seed=0)
    noise = _noise_distribution(corpus, g.node_count)
    cum = np.cumsum(noise)
    rng = np.random.default_rng(2)
    n_pairs = centers.shape[0]
    order = rng.permutation(n_pairs)
    negs = np.minimum(
        np.searchsorted(cum, rng.random((n_pairs, 5)).ravel(), side="right"),
        g.node_count - 1,
    ).reshape(n_pairs, 5).astype(np.int64)

    def run(kernel, d):
        rng2 = np.random.default_rng(0)
        vin = (rng2.random((g.node_count, d)) - 0.5) / d
        vout = np.zeros((g.node_count, d))
        kernel(vin, vout, centers, contexts, order, negs, 0.025, 0.025e-4, 0, n_pairs)

    for d in (16, 64, 128):
        t_np = timeit(run, _sgns_epoch_numpy, d, repeats=1)
        t_jit = timeit(run, compiled["sgns"], d)
        print(f"  d={d:3d} ({n_pairs} pairs): numpy {t_np * 1e3:8.2f} ms   "
              f"numba {t_jit * 1e3:8.2f} ms   speedup {t_np / t_jit:6.1f}x")


def main():
    if not _accel.HAS_NUMBA:
        print("numba is not installed; only the numpy path exists, nothing to compare")
        return
    if not _accel.NUMBA_ENABLED:
        print("RESTORE_NO_NUMBA is set; unset it so both paths are available")
        return
    print("compiling kernels...")
    compiled = {
        "jacobi": _accel.compile_loop(_jacobi_sweeps_loop),
        "walk": _accel.compile_loop(_walk_steps_loop),
        "sgns": _accel.compile_loop(_sgns_epoch_loop),
    }
    # warm the jit caches so timings exclude compilation
    rng = np.random.default_rng(0)
    a = np.eye(4)
    compiled["jacobi"](a.copy(), np.eye(4), 1e-14, 4)
    g = gen_synthetic("cycle", 4, seed=0)
    compiled["walk"](g.out_indptr, g.out_indices, g.in_indptr, g.in_indices,
                     0, 1.0, 1.0, rng.random(3), np.zeros(4, dtype=np.int64))
    compiled["sgns"](np.zeros((2, 2)), np.zeros((2, 2)),
                     np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64),
                     np.zeros(1, dtype=np.int64), np.zeros((1, 1), dtype=np.int64),
                     0.01, 1e-6, 0, 1)

    bench_jacobi(compiled)
    bench_walks(compiled)
    bench_sgns(compiled)
    print("\ndone")


if __name__ == "__main__":
    main()
