"""Benchmark the compiled occupancy kernel against the numpy fallback.

Runs the two-state employment chains for a segregated population at several
sizes, times both backends on identical counter-based streams, and checks
that the per-agent occupancies agree.

Usage::

    python benchmarks/bench_kernels.py [--n 5000] [--replications 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from occseg.calibration import DEFAULT_SPLIT_C1, calibrate
from occseg.model import StrategyProfile
from occseg.netmc import _kernel_py, generate_population
from occseg.netmc._streams import agent_keys

try:
    from occseg.netmc import _kernel as _kernel_cy
except ImportError:
    _kernel_cy = None


def bench(n: int, replications: int, burn_in: float, horizon: float) -> None:
    params = calibrate(c1=DEFAULT_SPLIT_C1)
    pop = generate_population(n, StrategyProfile(1.0, 0.0), params, seed=1)
    rates = params.c0 + params.c1 * pop.friend_measure()
    t_end = burn_in + horizon

    backends = [("python", _kernel_py)]
    if _kernel_cy is not None:
        backends.insert(0, ("cython", _kernel_cy))

    results = {}
    timings = {}
    for name, impl in backends:
        start = time.perf_counter()
        acc = np.zeros(n)
        for r in range(replications):
            keys = agent_keys(pop.seed, r, n)
            acc += impl.occupancy(keys, rates, burn_in, t_end)
        timings[name] = time.perf_counter() - start
        results[name] = acc / (replications * horizon)

    print(f"n={n} replications={replications} horizon={horizon}")
    for name in timings:
        rate = n * replications / timings[name]
        print(f"  {name:>7}: {timings[name]:8.3f} s   ({rate:,.0f} agent-chains/s)")
    if len(results) == 2:
        diff = np.abs(results["cython"] - results["python"]).max()
        speedup = timings["python"] / timings["cython"]
        print(f"  speedup: {speedup:.1f}x   max |occupancy diff|: {diff:.3g}")
    else:
        print("  compiled kernel not built; fallback only")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=5_000)
    ap.add_argument("--replications", type=int, default=5)
    ap.add_argument("--burn-in", type=float, default=200.0)
    ap.add_argument("--horizon", type=float, default=1_000.0)
    args = ap.parse_args()
    for n in sorted({1_000, args.n}):
        bench(n, args.replications, args.burn_in, args.horizon)


if __name__ == "__main__":
    main()
