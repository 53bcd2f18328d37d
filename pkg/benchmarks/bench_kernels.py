"""Micro-benchmark: compiled geometry kernels vs the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--number 20000]
"""

import argparse
import time

import numpy as np

from coplan import _kernels_py

try:
    from coplan import _kernels_c
except ImportError:
    _kernels_c = None

SQUARE = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])
HEX = np.array(
    [[1.0, 0.0], [0.5, 0.87], [-0.5, 0.87], [-1.0, 0.0], [-0.5, -0.87], [0.5, -0.87]]
) + np.array([4.0, 1.0])
LENGTHS = np.array([1.2, 1.0, 0.8, 0.6])
Q = np.array([0.3, -0.5, 0.9, -0.2])


def cases(rng, n):
    return rng.uniform(-3.0, 6.0, size=(n, 8))


def bench(label, fn, args_iter, number):
    start = time.perf_counter()
    for args in args_iter:
        fn(*args)
    elapsed = time.perf_counter() - start
    per_call = elapsed / number * 1e6
    print(f"  {label:<14} {elapsed:8.4f} s total  {per_call:9.3f} us/call")
    return elapsed


def run_suite(name, mod, data, number):
    print(f"{name}:")
    results = {}
    results["chain_points"] = bench(
        "chain_points", mod.chain_points,
        ((row[0], row[1], LENGTHS, Q) for row in data), number,
    )
    results["point_seg"] = bench(
        "point_seg", mod.point_seg, (tuple(row[:6]) for row in data), number
    )
    results["seg_seg"] = bench(
        "seg_seg", mod.seg_seg, (tuple(row) for row in data), number
    )
    results["poly_point"] = bench(
        "poly_point", mod.poly_point, ((SQUARE, row[0], row[1]) for row in data), number
    )
    results["poly_seg"] = bench(
        "poly_seg", mod.poly_seg, ((SQUARE, *row[:4]) for row in data), number
    )
    results["poly_poly"] = bench(
        "poly_poly", mod.poly_poly,
        ((SQUARE, np.ascontiguousarray(HEX + row[:2])) for row in data), number,
    )
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--number", type=int, default=20000, help="calls per kernel")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    data = cases(rng, args.number)

    py = run_suite("pure python", _kernels_py, data, args.number)
    if _kernels_c is None:
        print("compiled extension not available; nothing to compare")
        return
    c = run_suite("compiled", _kernels_c, data, args.number)

    print("speedup (python / compiled):")
    for name in py:
        print(f"  {name:<14} {py[name] / c[name]:6.1f}x")


if __name__ == "__main__":
    main()
