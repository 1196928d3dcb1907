#!/usr/bin/env python3
"""Benchmark the JIT kernels against their pure-Python bodies.

Runs each hot kernel through the compiled path and the uncompiled
``py_func`` path on identical inputs and prints the speedup. With
``TLBEAM_NUMBA=0`` both paths are the same interpreter code and the
ratio is ~1.

Usage: python benchmarks/bench_kernels.py [--n 1200]
"""

import argparse
import time

import numpy as np

from tlbeam import _kernels
from tlbeam._kernels import python_impl


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pairwise(n):
    rng = np.random.default_rng(0)
    angles = rng.uniform(0, 360, n)
    fast = _kernels.pairwise_circular_distances
    fast(angles[:4])  # warm the JIT
    return timeit(fast, angles), timeit(python_impl(fast), angles)


def bench_linkage(n):
    rng = np.random.default_rng(1)
    angles = rng.uniform(0, 360, n)
    dist = _kernels.pairwise_circular_distances(angles)
    fast = _kernels.complete_linkage_labels
    fast(dist[:4, :4].copy(), 30.0)
    return timeit(fast, dist, 30.0, repeat=1), \
        timeit(python_impl(fast), dist, 30.0, repeat=1)


def bench_objective(n_sets):
    rng = np.random.default_rng(2)
    n_cand, n_veh, n_gnb = 40, 50, 2
    beam_gnb = np.repeat(np.arange(n_gnb), n_cand // n_gnb).astype(np.int64)
    cover = rng.random((n_cand, n_veh)) < 0.3
    gain_full = rng.gamma(2.0, 4000.0, (n_cand, n_veh))
    gain_int = rng.gamma(1.0, 1.0, (n_cand, n_veh, n_gnb))
    pathloss = rng.random((n_gnb, n_veh)) * 1e-10
    p_tot = np.ones(n_gnb)
    thresholds = np.array([-np.inf] + list(np.logspace(-1, 2, 15)))
    effs = np.linspace(0.0, 5.5547, 16)
    sets = rng.integers(0, n_cand, size=(n_sets, 4)).astype(np.int64)

    def run_all(fn):
        total = 0.0
        for i in range(n_sets):
            total += fn(sets[i], 4, beam_gnb, cover, gain_full, gain_int,
                        pathloss, p_tot, 1e-11, thresholds, effs, 4e8)
        return total

    fast = _kernels.assignment_objective
    run_all(fast)  # warm
    t0 = time.perf_counter()
    run_all(fast)
    t_fast = time.perf_counter() - t0
    t0 = time.perf_counter()
    run_all(python_impl(fast))
    t_slow = time.perf_counter() - t0
    return t_fast, t_slow


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1200,
                        help="observation count for the clustering benchmarks")
    args = parser.parse_args()

    print(f"numba enabled: {_kernels.NUMBA_ENABLED}")
    rows = [
        ("pairwise circular distances", *bench_pairwise(args.n)),
        ("complete-linkage merge loop", *bench_linkage(min(args.n, 800))),
        ("assignment objective x2000", *bench_objective(2000)),
    ]
    print(f"{'kernel':<32} {'jit (s)':>10} {'python (s)':>12} {'speedup':>9}")
    for name, t_fast, t_slow in rows:
        ratio = t_slow / t_fast if t_fast > 0 else float("inf")
        print(f"{name:<32} {t_fast:>10.4f} {t_slow:>12.4f} {ratio:>8.1f}x")


if __name__ == "__main__":
    main()
