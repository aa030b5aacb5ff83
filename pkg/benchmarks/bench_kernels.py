"""Compiled kernels vs the numpy fallback.

Times each kernel on inputs shaped like the ones the package produces, then
the theorem sweep end to end under both backends (a subprocess per backend,
since the selection happens at import).

    python benchmarks/bench_kernels.py [--sweep-size 5] [--repeat 5]
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from covshift import _kernels_py as py

try:
    from covshift import _kernels as ext
except ImportError:
    ext = None


def cases(rng):
    # posterior gaps over a probe matrix, as in one theorem check
    probes = rng.dirichlet(np.ones(6), size=12)
    labels = np.array([0, 0, 1, 2, 2, 3], dtype=np.intp)
    in_a = np.array([1, 0, 1, 0, 1, 1], dtype=bool)
    ref = np.array([0.5, 1.0, 0.3, 1.0])
    # empirical threshold sweep: 10^5 distinct values, 1000 costs
    cum_pos = np.concatenate([[0.0], np.cumsum(rng.random(10**5) < 0.3)]).astype(np.float64)
    cum_neg = np.arange(cum_pos.size, dtype=np.float64) - cum_pos
    costs = np.linspace(0.001, 0.999, 1000)
    # Z evaluation and target counts: 1000 thresholds, 10^6 target points
    thr = np.sort(rng.normal(size=1000))
    cum_w = np.concatenate([[0.0], np.cumsum(np.full(1000, 0.000999))])
    x = rng.normal(size=10**6)
    xs = np.sort(x)
    return {
        "cell_totals (12x6)": lambda m: m.cell_totals(probes, in_a, labels, 4),
        "posterior_gaps (12x6)": lambda m: m.posterior_gaps(probes, in_a, labels, 4, ref),
        "best_split_indices (1e5 x 1000)": lambda m: m.best_split_indices(cum_pos, cum_neg, costs),
        "step_sum (1e6 points)": lambda m: m.step_sum(thr, cum_w, x),
        "upper_counts (1000 thresholds)": lambda m: m.upper_counts(xs, thr),
    }


def bench(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def sweep_seconds(size: int, pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["COVSHIFT_PURE_PYTHON"] = "1"
    code = ("import time; from covshift import kernels; from covshift.finite_space import sweep_theorem1;"
            f"t = time.perf_counter(); rows = list(sweep_theorem1(max_size={size}));"
            "print(kernels.BACKEND, time.perf_counter() - t)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, seconds = out.stdout.split()
    expected = "python" if pure or ext is None else "compiled"
    assert backend == expected, f"expected the {expected} backend, got {backend}"
    return float(seconds)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sweep-size", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'numpy':>12s} {'compiled':>12s} {'speedup':>8s}")
    for name, call in cases(rng).items():
        t_py = bench(lambda: call(py), args.repeat)
        if ext is None:
            print(f"{name:34s} {t_py * 1e6:10.1f}us {'n/a':>12s}")
            continue
        t_ext = bench(lambda: call(ext), args.repeat)
        print(f"{name:34s} {t_py * 1e6:10.1f}us {t_ext * 1e6:10.1f}us {t_py / t_ext:7.1f}x")

    t_py = sweep_seconds(args.sweep_size, pure=True)
    line = f"theorem sweep, |Omega| <= {args.sweep_size}: numpy {t_py:.2f}s"
    if ext is not None:
        t_ext = sweep_seconds(args.sweep_size, pure=False)
        line += f", compiled {t_ext:.2f}s ({t_py / t_ext:.1f}x)"
    print(line)


if __name__ == "__main__":
    main()
