"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are called explicitly, so the LAGTORUS_DISABLE_NUMBA flag does
not matter here.  The first numba call (JIT compile or cache load) is timed
separately and excluded from the steady-state numbers.
"""

from __future__ import annotations

import argparse
import time
import timeit

import numpy as np

from lagtorus import _kernels
from lagtorus.torus import FrameAtNorthPole


def _cases():
    f = FrameAtNorthPole()
    theta0 = np.linspace(-3.0, 3.0, 64)
    return {
        "lagrangian grid 1024^2": lambda b: _kernels.lagrangian_grid_residual(1024, f.N, f.e1, f.e2, backend=b),
        "rk4 circle flow 64 x 4000 x 8": lambda b: _kernels.rk4_circle_flow(theta0, 0.01, 1.0, 4000, 8, backend=b),
    }


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not _kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<32} {'first numba':>12} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, fn in _cases().items():
        t0 = time.perf_counter()
        fn("numba")
        first = time.perf_counter() - t0
        fast = min(timeit.repeat(lambda: fn("numba"), number=1, repeat=args.repeat))
        slow = min(timeit.repeat(lambda: fn("numpy"), number=1, repeat=args.repeat))
        print(f"{name:<32} {first:>11.3f}s {fast:>9.4f}s {slow:>9.4f}s {slow / fast:>7.1f}x")


if __name__ == "__main__":
    main()
