"""Time the compiled kernels against the pure-Python twin.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is called on the
same inputs by both backends; the table lists the best of several repeats.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from avcdiv import _kernels_py as py

try:
    from avcdiv import _kernels as cy
except ImportError:  # extension not built
    cy = None


def cases(rng: np.random.Generator) -> dict[str, tuple]:
    w1 = rng.dirichlet(np.ones(8), size=2).T
    w2 = rng.dirichlet(np.ones(8), size=2).T
    w3 = rng.dirichlet(np.ones(6), size=6).T
    p = np.array([0.3, 0.7])
    ll = np.log(rng.dirichlet(np.ones(2), size=2).T)
    codewords = rng.integers(0, 2, size=(16, 64))
    outputs = rng.integers(0, 2, size=(2000, 64))
    tie = rng.random(2000)
    return {
        "mutual_information": (p, w1),
        "binary_capacity": (w1, 1e-10),
        "minimax_two_state": (w1, w2, 1e-10),
        "min_over_theta": (p, w1, w2, 1e-10),
        "blahut_arimoto": (w3, 1e-10, 100000),
        "ml_decode": (ll, codewords, outputs, tie),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    args = ap.parse_args()
    inputs = cases(np.random.default_rng(0))
    print(f"{'kernel':<20}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for name, argv in inputs.items():
        t_py = min(timeit.repeat(lambda: getattr(py, name)(*argv), repeat=args.repeat, number=args.number))
        t_py *= 1e3 / args.number
        if cy is None:
            print(f"{name:<20}{t_py:>14.4f}{'n/a':>14}{'n/a':>10}")
            continue
        t_cy = min(timeit.repeat(lambda: getattr(cy, name)(*argv), repeat=args.repeat, number=args.number))
        t_cy *= 1e3 / args.number
        print(f"{name:<20}{t_py:>14.4f}{t_cy:>14.4f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
