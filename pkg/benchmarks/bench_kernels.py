"""Benchmark the enumeration kernels: numba vs numpy vs the pure-python
reference engine.

Usage: python3 benchmarks/bench_kernels.py [--r 6] [--python-r 4]

The python engine is timed at a smaller length (it is the per-word
reference, not a batch kernel). Counts are asserted identical across
backends before timing.
"""

from __future__ import annotations

import argparse
import time

from parkline import builtin, count_parking
from parkline._kernels import BACKENDS, resolve_backend


def time_count(p, r: int, backend: str) -> tuple[float, int]:
    # warm up once so numba compilation is not timed
    count_parking(p, min(r, 3), cap=None, backend=backend)
    t0 = time.perf_counter()
    count = count_parking(p, r, cap=None, backend=backend)
    return time.perf_counter() - t0, count


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=int, default=6, help="word length for the kernels")
    ap.add_argument("--python-r", type=int, default=4, help="word length for the python engine")
    args = ap.parse_args()

    for name in ("right", "closest", "lbs"):
        p = builtin(name)
        print(f"\n{name}: count_parking")
        baseline = None
        for backend in BACKENDS:
            try:
                resolve_backend(backend)
            except ValueError:
                print(f"  {backend:>7}: unavailable")
                continue
            r = args.python_r if backend == "python" else args.r
            elapsed, count = time_count(p, r, backend)
            words = (r + 1) ** r
            rate = words / elapsed / 1e6
            print(
                f"  {backend:>7}: r={r} count={count} "
                f"{elapsed * 1e3:8.1f} ms  {rate:7.2f} Mwords/s"
            )
            if backend != "python":
                if baseline is None:
                    baseline = count
                else:
                    assert count == baseline, "backends disagree"


if __name__ == "__main__":
    main()
