"""Compare the compiled kernels against the pure-numpy fallback.

Run as a script:  python benchmarks/bench_kernels.py [--pairs N] [--length L]

Both backends execute identical floating-point operations in the same
order, so outputs are compared for exact equality, not tolerance.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from clustercast._native import BACKEND, _fallback

if BACKEND == "native":
    from clustercast._native import _kernels
else:
    _kernels = None


def _time(fn, *args, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_dtw(n_pairs: int, length: int, dims: int, rng) -> None:
    pairs = [
        (
            np.ascontiguousarray(rng.normal(size=(length, dims))),
            np.ascontiguousarray(rng.normal(size=(length, dims))),
        )
        for _ in range(n_pairs)
    ]

    def run(module):
        return [module.dtw_full(a, b) for a, b in pairs]

    t_py = _time(run, _fallback)
    print(f"dtw_full      {n_pairs} pairs of ({length},{dims}):  python {t_py:.3f}s", end="")
    if _kernels is not None:
        t_nat = _time(run, _kernels)
        exact = run(_kernels) == run(_fallback)
        print(f"  native {t_nat:.3f}s  speedup {t_py / t_nat:5.1f}x  exact-equal {exact}")
    else:
        print("  (native backend not built)")


def bench_holt(n_series: int, length: int, rng) -> None:
    series = [np.ascontiguousarray(rng.normal(size=length) + 50) for _ in range(n_series)]
    grid = np.arange(21) / 20.0

    def run(module):
        return [module.holt_sse_grid(x, grid, grid) for x in series]

    t_py = _time(run, _fallback)
    print(f"holt_sse_grid {n_series} series of {length}:      python {t_py:.3f}s", end="")
    if _kernels is not None:
        t_nat = _time(run, _kernels)
        exact = all(
            np.array_equal(a, b) for a, b in zip(run(_kernels), run(_fallback))
        )
        print(f"  native {t_nat:.3f}s  speedup {t_py / t_nat:5.1f}x  exact-equal {exact}")
    else:
        print("  (native backend not built)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=30, help="DTW pairs to time")
    parser.add_argument("--series", type=int, default=200, help="Holt series to time")
    parser.add_argument("--length", type=int, default=200, help="sequence length")
    parser.add_argument("--dims", type=int, default=3, help="DTW dimensions per point")
    args = parser.parse_args()
    print(f"active backend: {BACKEND}")
    rng = np.random.default_rng(0)
    bench_dtw(args.pairs, args.length, args.dims, rng)
    bench_holt(args.series, args.length, rng)


if __name__ == "__main__":
    main()
