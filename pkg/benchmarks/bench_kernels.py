"""Time the compiled quadrature kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 16 32 48] [--repeat 3] [--threads 1]
"""
import argparse
import time

import numpy as np

from pslab import _kernels_py

try:
    from pslab import _kernels
except ImportError:
    _kernels = None


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 48, 64])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = [("python", _kernels_py)] + ([("compiled", _kernels)] if _kernels else [])
    print(f"{'kernel':<20}{'n':>5}" + "".join(f"{name:>14}" for name, _ in backends) + f"{'max |diff|':>14}")
    for kernel in ("star_integral_sum", "bopp_harmonic_sum"):
        for n in args.sizes:
            a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            times, outs = [], []
            for _, mod in backends:
                fn = getattr(mod, kernel)
                outs.append(fn(a, b, args.threads))
                times.append(best_time(lambda: fn(a, b, args.threads), args.repeat))
            diff = max(float(np.max(np.abs(o - outs[0]))) for o in outs)
            print(f"{kernel:<20}{n:>5}" + "".join(f"{t * 1e3:>12.2f}ms" for t in times) + f"{diff:>14.2e}")
    if _kernels is None:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
