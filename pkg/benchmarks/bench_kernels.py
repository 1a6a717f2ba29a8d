#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage:  python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from povmkit._kernels import _pykernels

try:
    from povmkit._kernels import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def make_cases():
    rng = np.random.default_rng(0)
    coeffs = rng.normal(size=32) + 1j * rng.normal(size=32)
    coeffs /= np.linalg.norm(coeffs)
    grid = np.arange(-1.37, 1.37, 0.02)
    zs = (grid[:, None] + 1j * grid[None, :]).ravel()
    ts = np.linspace(0.0, 40.0, 200_000)
    cells = (np.arange(-5.75, 6.0, 0.5)[:, None] + 1j * np.arange(-5.75, 6.0, 0.5)[None, :]).ravel()
    return [
        ("laguerre_values(12, 200k pts)", lambda m: m.laguerre_values(12, ts)),
        ("displacement_matrix(0.8+0.3j, 64)", lambda m: m.displacement_matrix(0.8 + 0.3j, 64)),
        (f"char_values(N=32, {zs.size} pts)", lambda m: m.char_values(coeffs, zs)),
        (f"coherent_overlaps(N=32, {zs.size} pts)", lambda m: m.coherent_overlaps(coeffs, zs)),
        (f"displaced_vectors(N=32, {cells.size} cells)", lambda m: m.displaced_vectors(coeffs, cells)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="best-of repetitions")
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled kernels not available; timing the numpy fallback only\n")

    width = 44
    header = f"{'kernel':<{width}} {'numpy':>10} {'cython':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in make_cases():
        t_py = best_of(lambda: call(_pykernels), args.repeat)
        if _ckernels is not None:
            t_cy = best_of(lambda: call(_ckernels), args.repeat)
            print(f"{name:<{width}} {t_py*1e3:>8.2f}ms {t_cy*1e3:>8.2f}ms {t_py/t_cy:>8.1f}x")
        else:
            print(f"{name:<{width}} {t_py*1e3:>8.2f}ms {'-':>10} {'-':>9}")


if __name__ == "__main__":
    main()
