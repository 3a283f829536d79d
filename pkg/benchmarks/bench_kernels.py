#!/usr/bin/env python3
"""Benchmark the compiled RK4 kernels against their pure-Python twins.

The shooting solver spends essentially all of its time in these loops: one
boundary-value solve integrates the polar flow over a 3*pi horizon at
dt = 1e-4 for every trial rate, so the kernel throughput decides whether a
solve takes a fraction of a second or tens of seconds.

Usage: python benchmarks/bench_kernels.py [--dt 1e-4]
"""

import argparse
import time

import numpy as np

from isingpulse import _kernels_py

try:
    from isingpulse import _kernels_cy
except ImportError:
    _kernels_cy = None


def time_call(fn, *args, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(dt):
    horizon_steps = int(round(3 * np.pi / dt))
    r0 = np.array([1.0, 0.0, 0.0])
    x0 = np.array([1.0, 0.0, 0.0, 0.0])
    us = 1.2377 + 0.3 * np.sin(np.linspace(0, np.pi, 1001))
    x8 = np.zeros(8)
    x8[0] = 1.0
    steps_mid = int(round(1.2692 / dt))
    return [
        ("polar shoot (3*pi horizon)", "rk4_polar",
         (r0, 0.52, 0.0, dt, horizon_steps)),
        ("window, constant drive", "rk4_step4_const",
         (x0, 1.04, dt, int(round(1.969 / dt)))),
        ("window, sampled pulse", "rk4_step4_pulse",
         (x0, us, 1.2692 / 1000, dt, steps_mid)),
        ("full ladder d=8, sampled pulse", "rk4_chain_pulse",
         (x8, 2, us, 1.2692 / 1000, dt, steps_mid)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dt", type=float, default=1e-4)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    print(f"dt = {args.dt:g}, best of {args.repeats}\n")
    header = f"{'workload':<34}{'python':>12}{'cython':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, name, call_args in workloads(args.dt):
        t_py = time_call(getattr(_kernels_py, name), *call_args, repeats=args.repeats)
        if _kernels_cy is None:
            print(f"{label:<34}{t_py:>11.4f}s{'n/a':>12}{'':>10}")
            continue
        t_cy = time_call(getattr(_kernels_cy, name), *call_args, repeats=args.repeats)
        a = getattr(_kernels_py, name)(*call_args)
        b = getattr(_kernels_cy, name)(*call_args)
        assert np.max(np.abs(a - b)) < 1e-12, f"backend mismatch in {name}"
        print(f"{label:<34}{t_py:>11.4f}s{t_cy:>11.4f}s{t_py / t_cy:>9.1f}x")
    if _kernels_cy is None:
        print("\ncompiled kernels unavailable; showing pure-Python timings only")


if __name__ == "__main__":
    main()
