"""Compare the compiled and pure-numpy descent kernels.

Usage: python3 benchmarks/bench_kernels.py [--points N]

Times the objective evaluation and full coordinate descents from random
starts on both backends and prints a small table.  The compiled backend
must be built (pip install -e .) for the comparison to be meaningful;
otherwise both rows report the pure backend.
"""

import argparse
import time

import numpy as np

from chainsynth import _kernels
from chainsynth._kernels import _pure

CONV_TOL = 0.000005
MAX_ITER = 10000
J12, J23 = 1.0, 0.9


def _starts(n, seed=2024):
    rng = np.random.default_rng(seed)
    return [(*rng.uniform(-5, 5, size=3), rng.uniform(5, 20))
            for _ in range(n)]


def _time_objective(impl, points, repeats=200):
    t0 = time.perf_counter()
    for _ in range(repeats):
        for e1, e2, e3, tau in points:
            impl.objective_value(e1, e2, e3, tau, J12, J23)
    elapsed = time.perf_counter() - t0
    return elapsed / (repeats * len(points))


def _time_descent(impl, points):
    t0 = time.perf_counter()
    rounds = 0
    for e1, e2, e3, tau in points:
        result = impl.descend(e1, e2, e3, tau, J12, J23,
                              CONV_TOL, MAX_ITER, 0.0)
        rounds += result[5]
    elapsed = time.perf_counter() - t0
    return elapsed / len(points), rounds / len(points)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=10,
                        help="number of random descent starts")
    args = parser.parse_args()

    backends = [("pure", _pure)]
    if _kernels.BACKEND == "compiled":
        backends.insert(0, ("compiled", _kernels._impl))
    else:
        print("note: compiled kernel not available, timing pure only")

    points = _starts(args.points)
    print(f"{args.points} descent starts, J = ({J12}, {J23})")
    print(f"{'backend':<10} {'objective (us)':>15} {'descent (ms)':>14} "
          f"{'rounds/descent':>15}")
    rows = {}
    for name, impl in backends:
        obj_s = _time_objective(impl, points)
        desc_s, mean_rounds = _time_descent(impl, points)
        rows[name] = (obj_s, desc_s)
        print(f"{name:<10} {obj_s * 1e6:>15.2f} {desc_s * 1e3:>14.2f} "
              f"{mean_rounds:>15.1f}")
    if len(rows) == 2:
        print(f"speedup: objective x{rows['pure'][0] / rows['compiled'][0]:.1f}, "
              f"descent x{rows['pure'][1] / rows['compiled'][1]:.1f}")


if __name__ == "__main__":
    main()
