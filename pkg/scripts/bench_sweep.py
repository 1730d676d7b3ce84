#!/usr/bin/env python3
"""Sweep the reference kernel over ranks, extents, and contraction counts and
print a throughput table.

Usage:
    python scripts/bench_sweep.py [--reps 3] [--max-macs 2e8]
"""

import argparse
import statistics
import time

import numpy as np

from gett.kernel import dgett
from gett.layout import TensorView, contiguous_increments, num_elements


def bench_point(rank, extent, conts, reps):
    ext = (extent,) * rank
    view = TensorView.contiguous(ext)
    rng = np.random.default_rng(0)
    a = rng.uniform(-1, 1, view.buffer_len)
    b = rng.uniform(-1, 1, view.buffer_len)
    rank_c = 2 * (rank - conts)
    ext_c = (extent,) * rank_c
    c = np.zeros(num_elements(ext_c))
    times = []
    for _ in range(reps):
        c[:] = 0.0
        start = time.perf_counter()
        errs = dgett(rank, ext, view.increments, a, rank, ext, view.increments, b,
                     conts, tuple(range(rank - conts, rank)), tuple(range(conts)),
                     tuple(range(rank_c)), contiguous_increments(ext_c), c)
        times.append(time.perf_counter() - start)
        assert errs == []
    macs = extent ** (rank_c + conts)
    return macs, statistics.median(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=3)
    parser.add_argument("--max-macs", type=float, default=2e8,
                        help="skip points with more multiply-adds than this")
    args = parser.parse_args()

    points = [
        (1, e, k) for e in (64, 1024, 16384) for k in (0, 1)
    ] + [
        (2, e, k) for e in (16, 64, 256) for k in (0, 1, 2)
    ] + [
        (3, e, k) for e in (8, 16, 32) for k in (0, 1, 2, 3)
    ] + [
        (4, e, k) for e in (4, 8) for k in (2, 3, 4)
    ]

    print(f"{'rank':>4} {'extent':>7} {'conts':>5} {'multiply-adds':>14} "
          f"{'median s':>10} {'MMAC/s':>9}")
    # warm the jit outside the timed region
    bench_point(1, 8, 1, 1)
    for rank, extent, conts in points:
        macs = extent ** (2 * rank - conts)
        if macs > args.max_macs:
            continue
        macs, med = bench_point(rank, extent, conts, args.reps)
        print(f"{rank:>4} {extent:>7} {conts:>5} {macs:>14} "
              f"{med:>10.5f} {macs / med / 1e6:>9.1f}")


if __name__ == "__main__":
    main()
