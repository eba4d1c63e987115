"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from rldas import _kernels_py

try:
    from rldas import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _crowding_case(rng, n, d):
    X = rng.uniform(-100, 100, (n, d))
    cost = rng.uniform(0, 1e4, n)
    U = X + rng.normal(0, 5, (n, d))
    cu = rng.uniform(0, 1e4, n)
    return X, cost, rng.random(n), rng.random(n), U, cu, rng.random(n), rng.random(n)


def _time(fn, make_args, repeat):
    # fresh copies: crowding_replace works in place
    return min(timeit.repeat(lambda: fn(*make_args()), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'shape':>12}{'python ms':>12}{'compiled ms':>13}{'speedup':>9}")
    for n, d in ((30, 10), (170, 10), (170, 50), (510, 30)):
        X = rng.uniform(-100, 100, (n, d))
        case = _crowding_case(rng, n, d)
        jobs = [
            ("pairwise_stats", lambda m: m.pairwise_stats, lambda: (X,)),
            ("crowding_replace", lambda m: m.crowding_replace, lambda: tuple(np.copy(a) for a in case)),
        ]
        for name, get, make in jobs:
            tp = _time(get(_kernels_py), make, args.repeat) * 1e3
            if _compiled is None:
                print(f"{name:<18}{f'{n}x{d}':>12}{tp:>12.3f}{'n/a':>13}{'':>9}")
                continue
            tc = _time(get(_compiled), make, args.repeat) * 1e3
            print(f"{name:<18}{f'{n}x{d}':>12}{tp:>12.3f}{tc:>13.3f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
