#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three hot loops (sector assignment, fused quasi-coherent signal,
exhaustive assignment search) on sizes representative of the convergence and
oracle experiments, and prints a small table with the speedup.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from switchmimo._kernels import numpy_backend
from switchmimo.combining import PhaseBank

try:
    from switchmimo._kernels import _speedups as compiled_backend
except ImportError:
    compiled_backend = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(1234)
    bank = PhaseBank(4)
    angles = rng.uniform(0.0, 2.0 * np.pi, 1_000_000)
    h_large = (rng.standard_normal(1_000_000) + 1j * rng.standard_normal(1_000_000)) * np.sqrt(0.5)
    # exhaustive search: 4^10 ~ 1.05e6 candidates, two users
    h_small = np.ascontiguousarray(
        (rng.standard_normal((2, 10)) + 1j * rng.standard_normal((2, 10))) * np.sqrt(0.5)
    )
    conj_bank = np.ascontiguousarray(bank.shifter_values.conj())

    cases = [
        ("sector_indices (1e6 angles, NQ=4)", lambda be: be.sector_indices(angles, 4)),
        ("quasi_signal (1e6 antennas, NQ=4)", lambda be: be.quasi_signal(h_large.copy(), bank.shifter_values)),
        ("best_assignment (4^10 candidates)", lambda be: be.best_assignment(h_small, conj_bank, 10.0)),
    ]

    print(f"{'kernel':40s} {'numpy':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, call in cases:
        t_np = best_of(lambda: call(numpy_backend), args.repeats)
        if compiled_backend is None:
            print(f"{label:40s} {t_np * 1e3:9.2f}ms {'n/a':>10s} {'n/a':>8s}")
            continue
        t_cy = best_of(lambda: call(compiled_backend), args.repeats)
        print(f"{label:40s} {t_np * 1e3:9.2f}ms {t_cy * 1e3:9.2f}ms {t_np / t_cy:7.1f}x")
    if compiled_backend is None:
        print("compiled backend not built; install with a C compiler to compare")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
