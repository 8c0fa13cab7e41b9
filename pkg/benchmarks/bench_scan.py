#!/usr/bin/env python3
"""Benchmark the pulsed-scan hot loop: numba closed-form kernel vs the
pure-numpy batched-eigendecomposition fallback.

The workload is the handedness-separation map: a grid of pulse areas, both
loop-coupling signs, 20000 midpoint steps per trajectory by default (the
acceptance-suite settings).

Usage:
    python benchmarks/bench_scan.py [--areas N] [--steps-per-tau S] [--repeat R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ccisim import _kernels
from ccisim.pulses import PulseSchedule, transfer_scan


def run_once(areas: np.ndarray, steps_per_tau: int, backend: str) -> tuple[float, float]:
    """Returns (wall seconds, final right-handed P3 at the mid cell)."""
    t0 = time.perf_counter()
    check = 0.0
    for tag in ("L", "R"):
        s = PulseSchedule.from_area(1.0, handedness=tag, dt=1.0 / steps_per_tau)
        _, pops = transfer_scan(s, areas, record_every=None, backend=backend)
        if tag == "R":
            check = float(pops[len(areas) // 2, -1, 2])
    return time.perf_counter() - t0, check


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--areas", type=int, default=116, help="size of the area grid")
    parser.add_argument("--steps-per-tau", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    areas = np.linspace(0.2, 2.5, args.areas)
    nsteps = 10 * args.steps_per_tau
    print(f"workload: {args.areas} areas x 2 handedness x {nsteps} steps "
          f"({2 * args.areas * nsteps / 1e6:.2f} M steps)")

    backends = ["numpy"]
    if _kernels.HAS_NUMBA:
        backends.insert(0, "numba")
        run_once(areas[:2], args.steps_per_tau, "numba")  # compile outside timing
    else:
        print("numba not available; benchmarking the numpy path only")

    timings: dict[str, float] = {}
    results: dict[str, float] = {}
    for backend in backends:
        best = np.inf
        for _ in range(args.repeat):
            wall, check = run_once(areas, args.steps_per_tau, backend)
            best = min(best, wall)
            results[backend] = check
        timings[backend] = best
        rate = 2 * args.areas * nsteps / best / 1e6
        print(f"{backend:>6s}: {best:8.3f} s  ({rate:6.1f} M steps/s)  "
              f"P3_R(mid) = {results[backend]:.9f}")

    if len(timings) == 2:
        print(f"speedup: numba is {timings['numpy'] / timings['numba']:.1f}x "
              f"faster than the numpy fallback")
        drift = abs(results["numba"] - results["numpy"])
        print(f"cross-check |P3_numba - P3_numpy| = {drift:.3e}")


if __name__ == "__main__":
    main()
