#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times one forward + backward pass (the unit of work every training and
inference iteration repeats) at a few model sizes, checks that the two
backends agree numerically, and prints a speedup table.

Usage: python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from glyphnet import _kernels_py
from glyphnet.network import init_params

try:
    from glyphnet import _kernels_c
except ImportError:
    _kernels_c = None


def step_time(kernels, w, x_seq, target, repeats):
    """Seconds per forward+backward, best of `repeats` timed blocks."""
    def once():
        outs = kernels.forward_pass(w, x_seq)
        d_y = 2.0 * (outs[0] - target) / target.size
        kernels.backward_pass(w, x_seq, *outs[2:], d_y)

    once()  # warm up
    best = float("inf")
    for _ in range(repeats):
        n = 5
        t0 = time.perf_counter()
        for _ in range(n):
            once()
        best = min(best, (time.perf_counter() - t0) / n)
    return best


def agreement(w, x_seq, target):
    """Worst relative difference between backends over all outputs."""
    outs_py = _kernels_py.forward_pass(w, x_seq)
    outs_c = _kernels_c.forward_pass(w, x_seq)
    d_y = 2.0 * (outs_py[0] - target) / target.size
    g_py, dx_py = _kernels_py.backward_pass(w, x_seq, *outs_py[2:], d_y)
    g_c, dx_c = _kernels_c.backward_pass(w, x_seq, *outs_c[2:], d_y)
    worst = 0.0
    for a, b in zip(list(outs_py) + list(g_py) + [dx_py],
                    list(outs_c) + list(g_c) + [dx_c]):
        scale = np.maximum(np.abs(a), 1e-9)
        worst = max(worst, float(np.max(np.abs(a - b) / scale)))
    return worst


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'size':>10} {'T':>4} {'python':>12} {'cython':>12} "
          f"{'speedup':>8} {'max rel diff':>13}")
    for n, steps in [(16, 25), (32, 30), (64, 40), (100, 50)]:
        params = init_params(n, n, seed=1)
        w = params.tensor_tuple()
        x_seq = np.tile(rng.normal(0, 0.5, 26), (steps, 1))
        target = rng.normal(0, 0.3, (steps, 4))
        t_py = step_time(_kernels_py, w, x_seq, target, args.repeats)
        if _kernels_c is None:
            print(f"{n:>10} {steps:>4} {t_py * 1e3:>10.3f}ms "
                  f"{'(unavailable)':>12}")
            continue
        t_c = step_time(_kernels_c, w, x_seq, target, args.repeats)
        diff = agreement(w, x_seq, target)
        print(f"{n:>10} {steps:>4} {t_py * 1e3:>10.3f}ms "
              f"{t_c * 1e3:>10.3f}ms {t_py / t_c:>7.1f}x {diff:>13.2e}")


if __name__ == "__main__":
    main()
