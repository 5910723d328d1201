#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Workloads mirror the hot paths of the experiment sweep: per-trial OMP runs
for the compressed-sensing baseline, and the row-shrinkage ADMM used for
uplink support recovery.  Both backends run the same seeded inputs and the
outputs are checked to agree before timings are reported.

Usage: python benchmarks/bench_kernels.py [--omp-runs N] [--admm-runs N]
"""

import argparse
import time

import numpy as np

from acsmimo.kernels import available_backends


def cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def bench_omp(mod, problems):
    t0 = time.perf_counter()
    outs = [mod.omp_solve(D, y, s) for D, y, s in problems]
    return time.perf_counter() - t0, outs


def bench_admm(mod, problems):
    t0 = time.perf_counter()
    outs = [mod.l21_ball_admm(Y, eps, tau, 2000, 1e-6, 1e-4)[0] for Y, eps, tau in problems]
    return time.perf_counter() - t0, outs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omp-runs", type=int, default=2000)
    ap.add_argument("--admm-runs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = available_backends()
    if len(backends) < 2:
        print("compiled backend not built; only measuring:", ", ".join(backends))

    rng = np.random.default_rng(args.seed)
    T, M, s = 20, 64, 12
    omp_problems = []
    for _ in range(args.omp_runs):
        D = cn(rng, (T, M))
        x = np.zeros(M, complex)
        x[rng.choice(M, s, replace=False)] = cn(rng, s)
        y = D @ x + 0.05 * cn(rng, T)
        omp_problems.append((D, y, s))

    admm_problems = []
    for _ in range(args.admm_runs):
        Y = 3.0 * cn(rng, (64, 10))
        admm_problems.append((Y, float(rng.uniform(1.0, 8.0)), float(rng.uniform(0.1, 1.0))))

    results = {}
    for name, mod in sorted(backends.items()):
        t_omp, out_omp = bench_omp(mod, omp_problems)
        t_admm, out_admm = bench_admm(mod, admm_problems)
        results[name] = (t_omp, t_admm, out_omp, out_admm)
        print(f"{name:8s}  omp: {t_omp:7.3f}s ({1e3 * t_omp / len(omp_problems):6.3f} ms/run)"
              f"   admm: {t_admm:7.3f}s ({1e3 * t_admm / len(admm_problems):6.3f} ms/run)")

    names = sorted(results)
    if len(names) == 2:
        a, b = names
        for xa, xb in zip(results[a][2], results[b][2]):
            assert np.allclose(xa, xb, atol=1e-8), "backends disagree on OMP output"
        for xa, xb in zip(results[a][3], results[b][3]):
            assert np.allclose(xa, xb, atol=1e-8), "backends disagree on ADMM output"
        print("outputs agree across backends")
        po, pa = results["python"][:2]
        co, ca = results["cython"][:2]
        print(f"speedup  omp: {po / co:5.1f}x   admm: {pa / ca:5.1f}x")


if __name__ == "__main__":
    main()
