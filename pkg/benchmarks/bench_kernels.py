#!/usr/bin/env python3
"""Side-by-side timing of the compiled and pure numpy kernels.

Run after installing the package:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from chaoslab import _kernels_py

try:
    from chaoslab import _kernels
except ImportError:
    _kernels = None


def timeit(fn, repeat):
    fn()  # warm caches / tables
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def bench(name, make_call, repeat):
    py_call = make_call(_kernels_py)
    t_py = timeit(py_call, repeat)
    if _kernels is None:
        print(f"{name:28s} python {1e3 * t_py:9.3f} ms   (no compiled backend)")
        return
    t_c = timeit(make_call(_kernels), repeat)
    print(f"{name:28s} python {1e3 * t_py:9.3f} ms   compiled "
          f"{1e3 * t_c:9.3f} ms   speedup {t_py / t_c:6.1f}x")


def main():
    rng = np.random.default_rng(0)

    box = 8
    side = 2 * box + 1
    w = rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
    w = 0.5 * (w + np.conj(w[::-1, ::-1]))
    w[box, box] = 0.0
    bench("galerkin_rhs (box=8)",
          lambda mod: (lambda: mod.galerkin_rhs(w, box)), repeat=50)

    q = 0.1 * (rng.standard_normal(8) + 1j * rng.standard_normal(8))
    args = (64.0, 2 * 3.35 ** 2, 1.0, 5.7, 0.07, 1.2e-3, 100_000, 10_000)
    bench("pdnls_rk4 (N=8, 1e5 steps)",
          lambda mod: (lambda: mod.pdnls_rk4(q, *args)), repeat=3)

    om = 1e-2 * rng.standard_normal(21)
    sub, sup = rng.standard_normal(21), rng.standard_normal(21)
    pair = rng.standard_normal(20)
    dargs = (1e-3, 100_000, 10_000)
    bench("dashed_rk4 (1e5 steps)",
          lambda mod: (lambda: mod.dashed_rk4(0.5, om, sub, sup, pair, *dargs)),
          repeat=3)


if __name__ == "__main__":
    main()
