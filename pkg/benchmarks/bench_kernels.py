"""Benchmark the numba sampling kernels against the pure-numpy fallbacks.

Both backends must produce bit-identical outputs; this script asserts that
before reporting timings.  Run as:

    python3 benchmarks/bench_kernels.py [--trials 2000000] [--dim 4]

DIRACSIM_NO_NUMBA=1 forces the numpy path package-wide; this script always
times both backends directly, regardless of the flag.
"""

import argparse
import time

import numpy as np

from diracsim import _kernels, random_density
from diracsim.experiment import (
    ExperimentConfig,
    StateSpec,
    _assignments,
    joint_sampling_tables,
    scan_sampling_tables,
)
from diracsim.pointer import gaussian_pointer


def time_call(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def scan_args(trials, dim, pointer):
    rho = random_density(dim, max(1, dim // 2), seed=1)
    tables = scan_sampling_tables(rho, g=0.01, pointer=pointer)
    cfg = ExperimentConfig(dim=dim, state=StateSpec(rank=1, seed=1), protocol="scan",
                           g=0.01, trials=trials, seed=7)
    scan_a, _, quad = _assignments(cfg)
    u = np.random.default_rng(cfg.seed).random((trials, 2))
    return (tables.outcome_cdf, tables.pos_cdf, tables.mom_cdf,
            tables.xgrid, tables.pgrid, scan_a, quad, u[:, 0], u[:, 1])


def joint_args(trials, dim, pointer):
    rho = random_density(dim, dim, seed=2)
    tables = joint_sampling_tables(rho, 0.02, 0.02, (pointer, pointer))
    cfg = ExperimentConfig(dim=dim, state=StateSpec(rank=1, seed=2), protocol="joint-weak",
                           g=0.02, g2=0.02, trials=trials, seed=8)
    _, cell, quad = _assignments(cfg)
    u = np.random.default_rng(cfg.seed).random((trials, 3))
    return (tables.hit_prob, tables.hit_pos_cdf, tables.miss_pos_cdf,
            tables.hit_mom_cdf, tables.miss_mom_cdf,
            tables.p2_hit_cdf, tables.p2_base_cdf,
            tables.x1grid, tables.p1grid, tables.x2grid,
            cell, quad, u[:, 0], u[:, 1], u[:, 2])


def accumulate_args(trials, dim):
    rng = np.random.default_rng(3)
    bins = rng.integers(0, 2 * dim, size=trials)
    weights = rng.standard_normal(trials)
    return bins, weights, 2 * dim


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=2_000_000)
    parser.add_argument("--dim", type=int, default=4)
    args = parser.parse_args()

    pointer = gaussian_pointer()
    cases = [
        ("scan_sample", _kernels.scan_sample_numpy,
         getattr(_kernels, "scan_sample_numba", None),
         scan_args(args.trials, args.dim, pointer)),
        ("joint_sample", _kernels.joint_sample_numpy,
         getattr(_kernels, "joint_sample_numba", None),
         joint_args(args.trials, args.dim, pointer)),
        ("accumulate", _kernels.accumulate_numpy,
         getattr(_kernels, "accumulate_numba", None),
         accumulate_args(args.trials, args.dim)),
    ]

    print(f"backend selected by package: {_kernels.backend_name()}")
    print(f"trials = {args.trials}, dim = {args.dim}\n")
    header = f"{'kernel':16s} {'numpy (s)':>10s} {'numba (s)':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))

    all_equal = True
    for name, numpy_fn, numba_fn, call in cases:
        t_np, out_np = time_call(numpy_fn, *call)
        if numba_fn is None:
            print(f"{name:16s} {t_np:10.3f} {'n/a':>10s} {'n/a':>8s}")
            continue
        numba_fn(*call)  # warm the JIT outside the clock
        t_nb, out_nb = time_call(numba_fn, *call)
        equal = all(np.array_equal(a, b) for a, b in zip(out_np, out_nb))
        all_equal = all_equal and equal
        print(f"{name:16s} {t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:7.1f}x")

    print(f"\nbit-identical outputs: {'yes' if all_equal else 'NO'}")
    if not all_equal:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
