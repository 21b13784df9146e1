#!/usr/bin/env python3
"""Benchmark the detector kernels: pure Python vs compiled extension,
per-sample stepping vs block processing.

Usage: python benchmarks/bench_kernels.py [--duration 300] [--repeats 3]
"""

import argparse
import time

from beatstream import DetectorConfig, SyntheticEcgSpec, generate
from beatstream.kernels import available_backends


def make_kernel(backend, cfg):
    return available_backends()[backend](
        cfg.hp_window, cfg.lp_window, cfg.threshold_window,
        cfg.update_rate, cfg.peak_fraction, cfg.refractory_samples,
        cfg.group_delay_samples)


def bench(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--duration", type=float, default=300.0,
                        help="synthetic recording length in seconds")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    cfg = DetectorConfig()
    rec = generate(SyntheticEcgSpec(duration_s=args.duration,
                                    mean_hr_bpm=70.0, noise_std=20.0,
                                    seed=1))
    values = rec.values()
    timestamps = rec.timestamps()
    n = len(values)
    print(f"{n} samples ({args.duration:.0f} s at "
          f"{cfg.sample_rate_hz} Hz), best of {args.repeats}\n")
    print(f"{'backend':<10} {'path':<8} {'time':>9} {'samples/s':>12} "
          f"{'x realtime':>11}")

    results = {}
    for backend in available_backends():
        def run_scalar(backend=backend):
            k = make_kernel(backend, cfg)
            step = k.step
            for i in range(n):
                step(values[i], timestamps[i])

        def run_block(backend=backend):
            make_kernel(backend, cfg).process(values, timestamps)

        for path, fn in (("scalar", run_scalar), ("block", run_block)):
            elapsed = bench(fn, args.repeats)
            rate = n / elapsed
            results[(backend, path)] = elapsed
            print(f"{backend:<10} {path:<8} {elapsed:>8.3f}s "
                  f"{rate:>12.0f} {rate / cfg.sample_rate_hz:>10.0f}x")

    if ("compiled", "block") in results and ("python", "block") in results:
        speedup = results[("python", "block")] / results[("compiled",
                                                          "block")]
        print(f"\ncompiled block speedup over python block: {speedup:.1f}x")


if __name__ == "__main__":
    main()
