"""Timing comparison of the numba and numpy kernel backends.

Run as `python -m pivotlab.bench`.  Each kernel is warmed first (numba
compiles on the first call), then timed best-of-N; outputs are also
compared so a backend divergence shows up here as well as in the tests.
Pass --samples to scale the Monte Carlo workloads.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import backends


def _time_best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _cases(samples: int, seed: int):
    lams5 = np.full(5, 10.0)
    lams3 = np.full(3, 4.0)
    members = np.zeros(3, dtype=np.int64)
    return [
        ("poisson_sample lam=3",
         lambda b: b.poisson_sample(3.0, samples, seed)),
        ("poisson_sample lam=100",
         lambda b: b.poisson_sample(100.0, samples, seed)),
        ("mc_outcome_counts",
         lambda b: b.mc_outcome_counts(12.0, 12.0, samples, seed)),
        ("mc_wta_pivot_count k=5",
         lambda b: b.mc_wta_pivot_count(lams5, 0, True, samples, seed)),
        ("mc_election_stats wta",
         lambda b: b.mc_election_stats(lams3, lams3, 0, 0, members,
                                       samples, seed, 64)),
        ("wta_pivot_unit lam=5e3",
         lambda b: b.wta_pivot_unit(np.full(3, 5000.0), True)),
    ]


def _same(a, b) -> bool:
    # integer reductions must agree bitwise; float kernels may differ by
    # summation order (numpy sums pairwise, the compiled loop serially)
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind in "iu" and b.dtype.kind in "iu":
        return bool(np.array_equal(a, b))
    return bool(np.allclose(a, b, rtol=1e-9, atol=0.0))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m pivotlab.bench",
        description="Time the numba kernels against the numpy fallback.")
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    numpy_backend = backends.use("numpy")
    numba_backend = backends.use("numba")

    print(f"samples={args.samples}  repeat={args.repeat}  best-of timings")
    print(f"{'kernel':<26} {'numpy':>10} {'numba':>10} {'speedup':>9}  match")
    rows = []
    for name, call in _cases(args.samples, args.seed):
        out_np = call(numpy_backend)   # warm + reference output
        out_nb = call(numba_backend)   # triggers JIT before timing
        t_np = _time_best(lambda: call(numpy_backend), args.repeat)
        t_nb = _time_best(lambda: call(numba_backend), args.repeat)
        match = _same(out_np, out_nb)
        rows.append(match)
        print(f"{name:<26} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms "
              f"{t_np / t_nb:>8.1f}x  {'yes' if match else 'NO'}")

    if not all(rows):
        print("backend outputs diverged")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
