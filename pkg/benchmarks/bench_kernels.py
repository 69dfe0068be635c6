"""Compare the compiled and pure-Python mod-p row reduction.

Runs the raw kernel on random dense matrices and an end-to-end workload
(a free resolution plus an Ext computation) under each available backend.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sqext import linalg
from sqext.abcat import cyclic_module
from sqext.homres import ext_module, free_resolution
from sqext.ring import PolyRing, PrimeField

P = 32003


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_case(n, m, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, P, size=(n, m), dtype=np.int64)
    F = PrimeField(P)
    return lambda: linalg.rank(A, F)


def workload_case():
    def run():
        # build fresh objects so no cached result is reused between runs
        R = PolyRing(3, PrimeField(P))
        rel = [R.poly("x1^2 - x0*x2")]
        k = cyclic_module(R, ["x0", "x1", "x2"], ring_relations=rel)
        free_resolution(k, 5)
        ext_module(3, k, k)

    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    cases = [(f"rank {n}x{n}", kernel_case(n, n)) for n in (50, 100, 200)]
    cases.append(("quadric cone: resolve + Ext^3(k,k)", workload_case()))
    backends = linalg.available_backends()
    print(f"{'case':36s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in cases:
        row = {}
        for b in backends:
            linalg.set_backend(b)
            fn()  # warm caches
            row[b] = best_of(fn, args.repeat)
        line = f"{name:36s}" + "".join(f"{row[b]:11.4f}s" for b in backends)
        if len(backends) > 1:
            line += f"  {row['python'] / row['cython']:9.1f}x"
        print(line)
    linalg.set_backend(backends[0])


if __name__ == "__main__":
    main()
