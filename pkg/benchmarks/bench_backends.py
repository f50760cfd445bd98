#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python/numpy fallback.

Covers the three hot kernels (pointwise evaluation, monotone bisection,
Simpson quadrature) plus two end-to-end operations whose profiles differ:
the crossing solver is scalar-bisection heavy (compiled wins big), while
the level-grid oracle is batch-oriented (the numpy fallback keeps up).

Run:  python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from fuzzint import PiecewiseFn, backend, sugeno_integral, sugeno_oracle
from fuzzint import _kernels_py
from fuzzint.exprdsl import compile_expr, parse_expr

try:
    from fuzzint import _kernels as compiled
except ImportError:
    compiled = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_benchmarks(repeats):
    prog = compile_expr(parse_expr("0.3*x^0.5+0.5*x^1.7+0.2*x^2.5"))
    xs = np.linspace(0.0, 1.0, 1_000_000)
    targets = np.sort(np.random.default_rng(0).uniform(0.01, 0.99, 100_000))
    rows = []
    for label, module in _backends():
        rows.append((f"eval_many 1e6 [{label}]",
                     timeit(lambda m=module: m.eval_many(prog, xs), repeats)))
        rows.append((f"bisect_root x2000 [{label}]",
                     timeit(lambda m=module: [
                         m.bisect_root(prog, 0.0, 1.0, 0.0, 1.0,
                                       t, 1e-12, 200)
                         for t in np.linspace(0.05, 0.95, 2000)], repeats)))
        rows.append((f"bisect_root_sorted 1e5 [{label}]",
                     timeit(lambda m=module: m.bisect_root_sorted(
                         prog, 0.0, 1.0, 0.0, 1.0, targets, 1e-9), repeats)))
        rows.append((f"simpson n=8192 [{label}]",
                     timeit(lambda m=module: m.simpson(prog, 0.0, 1.0, 8192),
                            repeats)))
    return rows


def _backends():
    out = []
    if compiled is not None:
        out.append(("cython", compiled))
    out.append(("pure-python", _kernels_py))
    return out


def end_to_end_benchmarks(repeats):
    f = PiecewiseFn.from_expr("0.3*x^0.5+0.5*x^1.7+0.2*x^2.5")
    rows = []
    previous = backend.name()
    try:
        for label, _ in _backends():
            backend.use(label)
            rows.append((f"sugeno_integral x50 [{label}]",
                         timeit(lambda: [sugeno_integral(f) for _ in range(50)],
                                repeats)))
            rows.append((f"sugeno_oracle n=1e5 [{label}]",
                         timeit(lambda: sugeno_oracle(f, n=100_000), repeats)))
    finally:
        backend.use(previous)
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels not built; timing the pure backend only")
    rows = kernel_benchmarks(args.repeats) + end_to_end_benchmarks(args.repeats)
    width = max(len(r[0]) for r in rows)
    print(f"{'benchmark'.ljust(width)}  best of {args.repeats}")
    by_name = {}
    for name, secs in rows:
        print(f"{name.ljust(width)}  {secs * 1000:10.2f} ms")
        base = name.split(" [")[0]
        by_name.setdefault(base, {})[name.split("[")[1].rstrip("]")] = secs
    if compiled is not None:
        print("\nspeedup (pure-python / cython):")
        for base, t in by_name.items():
            if len(t) == 2:
                print(f"  {base.ljust(width - 2)}  {t['pure-python'] / t['cython']:6.1f}x")


if __name__ == "__main__":
    main()
