#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Usage: python benchmarks/bench_backends.py [n_points]

Times each hot kernel on identical inputs and prints per-call times plus
the speedup of the compiled extension.  If the extension is not built the
script reports that and exits.
"""

import sys
import time

import numpy as np

from rqtraj._kernels import _fallback

try:
    from rqtraj._kernels import _core
except ImportError:
    _core = None


def _best_of(fn, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    if _core is None:
        print("compiled kernels are not built; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    x = np.ascontiguousarray(rng.uniform(-6.0, 6.0, n))
    t = np.ascontiguousarray(rng.uniform(-9.0, 9.0, n))
    p1, d1, p2, d2 = _fallback.trig_pair(1.3, x)
    gamma = np.full_like(x, -1.69)
    p, dp, d2p = _fallback.momentum_triplet(p1, d1, p2, d2, gamma, 1.7, -0.4, 1.3)
    g = np.full_like(x, 0.9)
    zeros = np.zeros_like(x)
    eps = np.full_like(x, 1.4142135623730951)
    xd, xdd, xddd = _fallback.kinematics_triplet(p, dp, d2p, g, zeros, zeros)

    cases = [
        ("trig_pair", lambda m: m.trig_pair(1.3, x)),
        ("exp_pair", lambda m: m.exp_pair(0.7, x)),
        ("momentum_triplet", lambda m: m.momentum_triplet(p1, d1, p2, d2, gamma, 1.7, -0.4, 1.3)),
        ("kinematics_triplet", lambda m: m.kinematics_triplet(p, dp, d2p, g, zeros, zeros)),
        ("qshje_residual_rel", lambda m: m.qshje_residual_rel(p, dp, d2p, eps)),
        ("firqnl_residual_rel", lambda m: m.firqnl_residual_rel(xd, xdd, xddd, eps, zeros, zeros)),
        ("prop_position", lambda m: m.prop_position(t, 0.1, 1.4, 0.3, 1.2, 0.8)),
        ("prop_velocity", lambda m: m.prop_velocity(t, 0.1, 1.4, 0.3, 0.9, 0.8)),
        ("evan_position", lambda m: m.evan_position(t, 10.0, -1.0, 0.2, 0.625, 1.0667)),
        ("evan_velocity", lambda m: m.evan_velocity(t, 10.0, -1.0, 0.2, 0.533, 1.0667)),
    ]

    print(f"n = {n} points, best of 7 runs")
    print(f"{'kernel':<20} {'python (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    for name, call in cases:
        t_py = _best_of(lambda: call(_fallback)) * 1e3
        t_c = _best_of(lambda: call(_core)) * 1e3
        print(f"{name:<20} {t_py:>12.3f} {t_c:>14.3f} {t_py / t_c:>7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
