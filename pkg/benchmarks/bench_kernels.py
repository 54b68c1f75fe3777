#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each hot kernel on a representative workload under both backends and
prints a timing table.  Numba timings exclude the first (compilation) call.

    python3 benchmarks/bench_kernels.py [--spf-limit 10000000] [--grid-n 3000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from multact_lab._backend import load_kernels


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--spf-limit", type=int, default=10**7)
    parser.add_argument("--grid-n", type=int, default=3000)
    parser.add_argument("--prog-n", type=int, default=10**5)
    parser.add_argument("--u2-n", type=int, default=2048)
    args = parser.parse_args()

    backends = {"numpy": load_kernels("numpy")}
    try:
        backends["numba"] = load_kernels("numba")
    except ImportError:
        print("numba not importable; benchmarking numpy only")

    spf_small = backends["numpy"].spf_sieve(10**6)
    primes_small = np.flatnonzero(spf_small == np.arange(10**6 + 1))
    primes_small = primes_small[primes_small >= 2].astype(np.int64)
    prog_primes = primes_small[primes_small <= 70000]
    rng = np.random.default_rng(0)
    useq = np.exp(2j * np.pi * rng.random(args.u2_n))

    N = args.grid_n
    alpha = np.array([1, 0, 1, 1], dtype=np.int64)
    beta = np.array([0, 1, 1, 2], dtype=np.int64)
    woff = np.ones(4, dtype=np.int64)
    wlen = np.array([N, N, 2 * N, 3 * N], dtype=np.int64)
    row_off = np.arange(5, dtype=np.int64)
    row_acc = np.zeros(4, dtype=np.int64)
    tab = rng.integers(0, 2, size=(4, 3 * N)).astype(np.int16)
    const = np.zeros(1, dtype=np.int64)
    dims = np.array([2], dtype=np.int64)

    workloads = {
        f"spf_sieve({args.spf_limit:.0e})": lambda K: K.spf_sieve(args.spf_limit),
        "omega_from_spf(1e6)": lambda K: K.omega_from_spf(spf_small),
        f"progression_sieve(46656n+1, N={args.prog_n:.0e})": lambda K: K.progression_sieve(
            46656, 1, args.prog_n, prog_primes
        ),
        f"joint_counts_grid(N={N})": lambda K: K.joint_counts_grid(
            N, alpha, beta, woff, wlen, row_off, row_acc, tab, const, dims,
            0, 1, 0, 1, 0, np.zeros(2, dtype=np.int64)
        ),
        f"u2_pow(N={args.u2_n})": lambda K: K.u2_pow(useq),
    }

    print(f"{'kernel':44s}" + "".join(f"{name:>12s}" for name in backends))
    for label, work in workloads.items():
        times = []
        for name, K in backends.items():
            if name == "numba":
                work(K)  # compile outside the timed region
            times.append(timeit(lambda: work(K)))
        cells = "".join(f"{t * 1000:11.1f}ms" for t in times)
        print(f"{label:44s}{cells}")
    if len(backends) == 2:
        print("\n(numba timings exclude compilation; cache warm after first run)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
