"""Timing comparison of the compiled kernels against the pure fallback.

Run:  python3 benchmarks/bench_kernels.py [--rows N] [--fwht-n K] [--repeat R]

Outputs agree bit-for-bit between backends; this script re-checks that
on every run before printing timings.
"""

import argparse
import time

import numpy as np

from prclab._kernels import pure

try:
    from prclab._kernels import _core
except ImportError:
    _core = None


def _best_of(repeat, fn, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=1_000_000, help="oracle batch rows")
    ap.add_argument("--words", type=int, default=2, help="words per query row")
    ap.add_argument("--fwht-n", type=int, default=20, help="transform size 2^n")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    words = rng.integers(0, 1 << 63, size=(args.rows, args.words), dtype=np.uint64)
    vec = rng.normal(size=1 << args.fwht_n)

    if _core is None:
        print("compiled backend not built; showing pure timings only")
    else:
        assert np.array_equal(
            pure.oracle_bits(1, 2, 100, words), _core.oracle_bits(1, 2, 100, words)
        )
        a, b = vec.copy(), vec.copy()
        pure.fwht_inplace(a)
        _core.fwht_inplace(b)
        assert np.array_equal(a, b)
        print("backends agree bit-for-bit")

    t = _best_of(args.repeat, pure.oracle_bits, 1, 2, 100, words)
    print(f"oracle_bits pure      {args.rows} rows: {t * 1e3:8.2f} ms")
    if _core is not None:
        tc = _best_of(args.repeat, _core.oracle_bits, 1, 2, 100, words)
        print(f"oracle_bits compiled  {args.rows} rows: {tc * 1e3:8.2f} ms   ({t / tc:.2f}x)")

    def run_pure():
        pure.fwht_inplace(vec.copy())

    t = _best_of(args.repeat, run_pure)
    print(f"fwht pure             2^{args.fwht_n}: {t * 1e3:8.2f} ms")
    if _core is not None:

        def run_core():
            _core.fwht_inplace(vec.copy())

        tc = _best_of(args.repeat, run_core)
        print(f"fwht compiled         2^{args.fwht_n}: {tc * 1e3:8.2f} ms   ({t / tc:.2f}x)")


if __name__ == "__main__":
    main()
