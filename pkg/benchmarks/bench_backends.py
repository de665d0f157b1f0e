"""Throughput comparison of the numba kernel against the numpy fallback.

Runs the same compiled tapes through both backends over growing point
batches and reports points/second plus the largest relative deviation
between the two result sets.

    python benchmarks/bench_backends.py [--sizes 1000,10000,100000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fermat_pdde.backends import NUMBA_AVAILABLE, available_backends, eval_batch
from fermat_pdde.elliptic import default_context
from fermat_pdde.parser import parse
from fermat_pdde.problemfile import load_problem
from fermat_pdde.tape import compile_expr


def sample(n, count, radius, seed):
    rng = np.random.default_rng(seed)
    u = rng.random((count, n))
    theta = rng.random((count, n))
    return radius * np.sqrt(u) * np.exp(2j * np.pi * theta)


def workloads():
    # deviation is only meaningful on non-cancelling outputs, so these
    # avoid identities that collapse to roundoff noise
    lp = load_problem("fixtures/example1.json")
    yield "example1 candidate (n=5)", compile_expr(lp.f), 5, 2.0, None
    ctx = default_context()
    wp_heavy = parse("wp(z1)*wpd(z2) + wp(z1+z2/2)", 2)
    yield "wp-heavy (n=2)", compile_expr(wp_heavy), 2, 1.3, ctx
    poly = parse("(z1+2*z2-z3/2)^6 + exp(z1*z2/4)*sin(z3)", 3)
    yield "polynomial+exp (n=3)", compile_expr(poly), 3, 1.5, ctx


def bench_once(tape, pts, backend, ell, repeats=5):
    eval_batch(tape, pts, ell=ell, backend=backend)  # warm-up / JIT
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = eval_batch(tape, pts, ell=ell, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"backends available: {', '.join(available_backends())}")
    if not NUMBA_AVAILABLE:
        print("numba not importable: timing the numpy path only")

    for name, tape, n, radius, ell in workloads():
        print(f"\n== {name} ({len(tape.ops)} tape instructions) ==")
        header = f"{'points':>9} | {'numpy':>12} | {'numba':>12} | {'speedup':>8} | {'max rel dev':>11}"
        print(header)
        print("-" * len(header))
        for size in sizes:
            pts = sample(n, size, radius, seed=12345)
            t_np, (v_np, ok_np) = bench_once(tape, pts, "numpy", ell, args.repeats)
            row = f"{size:>9} | {size / t_np:>10.0f}/s | "
            if NUMBA_AVAILABLE:
                t_nb, (v_nb, ok_nb) = bench_once(tape, pts, "numba", ell, args.repeats)
                both = ok_np & ok_nb
                dev = 0.0
                if both.any():
                    scale = np.maximum(1.0, np.abs(v_np[both]))
                    dev = float((np.abs(v_nb[both] - v_np[both]) / scale).max())
                row += f"{size / t_nb:>10.0f}/s | {t_np / t_nb:>7.2f}x | {dev:>11.2e}"
            else:
                row += f"{'-':>12} | {'-':>8} | {'-':>11}"
            print(row)


if __name__ == "__main__":
    main()
