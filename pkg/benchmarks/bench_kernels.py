"""Timing comparison of the compiled and pure-Python 5x5 kernels.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeats 5] [--inner 20000]

Each kernel is timed over ``inner`` calls, best of ``repeats`` rounds.
The compiled extension mirrors the pure code expression-for-expression,
so the output is a pure speed comparison at identical results.
"""

import argparse
import math
import time

import numpy as np

from dimwitness import _kernels_py


def load_backends():
    backends = [("python", _kernels_py)]
    try:
        from dimwitness import _kernels_cy
        backends.append(("compiled", _kernels_cy))
    except ImportError:
        print("note: compiled extension not built; timing python only")
    return backends


def best_time(fn, inner, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, time.perf_counter() - t0)
    return best / inner


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--inner", type=int, default=20000)
    args = ap.parse_args()

    rng = np.random.default_rng(8080)
    m = rng.uniform(-1.0, 1.0, size=(5, 5))
    beta = rng.uniform(-math.pi, math.pi, size=5)
    phi = rng.uniform(-math.pi, math.pi, size=4)
    f = _kernels_py.prob_matrix(beta, phi)

    cases = [
        ("det5", lambda mod: (lambda: mod.det5(m))),
        ("adjugate5", lambda mod: (lambda: mod.adjugate5(m))),
        ("prob_matrix", lambda mod: (lambda: mod.prob_matrix(beta, phi))),
        ("sigma_t2_sum", lambda mod: (lambda: mod.sigma_t2_sum(f))),
        ("adj_frobenius", lambda mod: (lambda: mod.adj_frobenius(beta, phi))),
    ]

    backends = load_backends()
    print(f"{'kernel':<15}" + "".join(f"{name:>14}" for name, _ in backends)
          + ("      speedup" if len(backends) == 2 else ""))
    for label, make in cases:
        times = [best_time(make(mod), args.inner, args.repeats)
                 for _, mod in backends]
        row = f"{label:<15}" + "".join(f"{t * 1e6:>12.2f}us" for t in times)
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
