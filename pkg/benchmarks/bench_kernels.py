"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is run on identical inputs through both backends; the table
shows the best of N wall-clock times and the largest output difference.
"""

import argparse
import time

import numpy as np

from vsystem._backend import compiled_kernels, python_kernels

PARAMS = (1.0, 2.28e-6, 1e-4, 0.8, 0.2, 0.0)


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    d2 = np.linspace(-200, 200, 4001)
    A, c = python_kernels.assemble(*PARAMS, d2)
    A1, c1 = python_kernels.assemble(1.0, 1e-3, 1e-2, 2.0, 0.3, 0.5, np.array([0.7]))
    rng = np.random.default_rng(0)
    X0 = rng.uniform(-0.3, 0.3, size=(3, 8))
    return [
        ("assemble, 4001 points", lambda k: k.assemble(*PARAMS, d2)[0]),
        ("solve_batch, 4001 systems", lambda k: k.solve_batch(A, c)[0]),
        ("steady_scan, 4001 points", lambda k: k.steady_scan(*PARAMS, d2)[0]),
        ("rk4, 3 states x 200000 steps", lambda k: k.rk4(A1[0], c1, X0, 0.01, 200_000, 1e6)[0]),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if compiled_kernels is None:
        print("compiled kernels are not built; nothing to compare")
        return 1
    print(f"{'kernel':32s} {'compiled':>12s} {'numpy':>12s} {'speedup':>9s} {'max diff':>10s}")
    for name, run in cases():
        tc, xc = best_of(lambda: run(compiled_kernels), args.repeat)
        tp, xp = best_of(lambda: run(python_kernels), args.repeat)
        diff = float(np.max(np.abs(np.asarray(xc) - np.asarray(xp))))
        print(f"{name:32s} {tc * 1e3:10.2f}ms {tp * 1e3:10.2f}ms {tp / tc:8.1f}x {diff:10.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
