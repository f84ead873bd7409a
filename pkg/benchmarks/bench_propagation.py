"""Benchmark the compiled frame-propagation kernel against the pure twin.

Usage: python benchmarks/bench_propagation.py [substeps_total]
"""

import sys
import time

import numpy as np

from hypframe import propagation as pure
from hypframe.framedcurve import CurvatureQuartet, FrameSample
from hypframe.symexpr import vectorized

try:
    from hypframe import _propagation as compiled
except ImportError:
    compiled = None


def build_inputs(total_substeps):
    q = CurvatureQuartet.from_strings("sin(t)", "1", "2+0.5*cos(t)", "0.2*t")
    t0, t1 = 0.0, 4.0
    nint = 400
    nsub = max(1, total_substeps // nint)
    dt = (t1 - t0) / nint
    hs = np.full(nint, dt / nsub)
    substeps = np.full(nint, nsub, dtype=np.int64)
    starts = (t0 + dt * np.arange(nint)[:, None]
              + (dt / nsub) * np.arange(nsub)[None, :]).ravel()
    node_ts = np.stack([starts + pure.GAUSS_C1 * dt / nsub,
                        starts + pure.GAUSS_C2 * dt / nsub], axis=1)
    node_vals = np.empty((len(starts), 2, 4))
    for j, e in enumerate(q):
        node_vals[:, :, j] = vectorized(e)(node_ts)
    return node_vals, hs, substeps, FrameSample.standard(t0).matrix()


def run(kernel, args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = kernel.propagate(*args, 1e-10)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    total = int(sys.argv[1]) if len(sys.argv) > 1 else 40_000
    args = build_inputs(total)
    n = len(args[0])
    t_pure, out_pure = run(pure, args)
    print(f"pure python : {t_pure * 1e3:9.2f} ms for {n} substeps "
          f"({n / t_pure:,.0f} substeps/s)")
    if compiled is None:
        print("compiled    : not built")
        return
    t_comp, out_comp = run(compiled, args)
    print(f"cython      : {t_comp * 1e3:9.2f} ms for {n} substeps "
          f"({n / t_comp:,.0f} substeps/s)")
    print(f"speedup     : {t_pure / t_comp:8.1f}x")
    dev = np.abs(out_pure[0] - out_comp[0]).max()
    print(f"max frame deviation between backends: {dev:.3e}")


if __name__ == "__main__":
    main()
