"""Time GF(2) row reduction with the compiled kernel and the pure-Python path.

Usage: python3 benchmarks/bench_rref.py [--sizes 64 256 1024] [--repeat 3]
"""

from __future__ import annotations

import argparse
import random
import time

from jokerkit import f2core


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512, 1024])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = random.Random(args.seed)
    compiled = f2core.compiled_available()
    print(f"compiled kernel available: {compiled}")
    print(f"{'n':>6} {'python (s)':>12} {'compiled (s)':>13} {'speedup':>8}")
    for n in args.sizes:
        rows = [rng.getrandbits(n) for _ in range(n)]
        t_py = best_time(lambda: f2core.rref_rows(rows, n, backend="python"), args.repeat)
        if compiled:
            expected = f2core.rref_rows(rows, n, backend="python")
            if f2core.rref_rows(rows, n, backend="compiled") != expected:
                raise SystemExit(f"backends disagree at n={n}")
            t_c = best_time(lambda: f2core.rref_rows(rows, n, backend="compiled"), args.repeat)
            print(f"{n:>6} {t_py:>12.4f} {t_c:>13.4f} {t_py / t_c:>7.1f}x")
        else:
            print(f"{n:>6} {t_py:>12.4f} {'-':>13} {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
