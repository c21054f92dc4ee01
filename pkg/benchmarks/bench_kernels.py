#!/usr/bin/env python3
"""Numba vs pure-numpy timing for the Macdonald kernels.

    python benchmarks/bench_kernels.py [--size 20000] [--repeat 5]

Both backends are loaded in the same process (the numpy loops are always
built); the first numba call is timed separately because it includes JIT
compilation or a cache load.
"""
import argparse
import time

import numpy as np

from klortho import _kernels
from klortho._accel import USE_NUMBA


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(7)
    tau = rng.uniform(0.0, 30.0, args.size)
    x = rng.uniform(0.05, 50.0, args.size)
    nu = rng.uniform(0.0, 5.0, args.size)

    cases = {
        "kiv": (lambda b: _kernels.kiv(tau, x, backend=b)),
        "kv": (lambda b: _kernels.kv(nu, x, backend=b)),
    }
    print(f"points per call: {args.size}, best of {args.repeat}")
    if not USE_NUMBA:
        print("numba disabled (KLORTHO_DISABLE_NUMBA) or missing; numpy only")
    for name, call in cases.items():
        t_np = best_of(lambda: call("numpy"), args.repeat)
        line = f"{name:4s} numpy {t_np * 1e3:9.2f} ms"
        if USE_NUMBA:
            t0 = time.perf_counter()
            ref = call("numba")
            first = time.perf_counter() - t0
            t_nb = best_of(lambda: call("numba"), args.repeat)
            diff = np.max(np.abs(ref - call("numpy")) / np.abs(ref))
            line += f"   numba {t_nb * 1e3:9.2f} ms (first call {first:.2f} s)   speedup {t_np / t_nb:6.1f}x"
            line += f"   max rel diff {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
