"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are run in the same process by flipping ``_accel.USE_NUMBA``;
results are checked for equality before timing.
"""

import argparse
import time

import numpy as np

from mulab import _accel
from mulab.kernels import p1_images, rank_mod_p, short_vectors
from mulab.modsym import merel_matrices, p1_list


def _p1_case(N=210, n=13):
    P = p1_list(N)
    mats = merel_matrices(n)
    return lambda: p1_images(P.cs, P.ds, mats, N, P.table)


def _short_case():
    # Gram matrix of a maximal order of discriminant 389, scaled to be even
    from mulab.quaternion import maximal_order, quaternion_algebra
    O = maximal_order(quaternion_algebra(389))
    G = np.array(O.scaled_gram(1), dtype=np.int64)
    return lambda: short_vectors(G, 400)


def _rank_case(n=160, p=10007, seed=1):
    rng = np.random.default_rng(seed)
    A = rng.integers(-50, 50, size=(n, n))
    A[:, -1] = A[:, 0] + A[:, 1]
    return lambda: rank_mod_p(A, p)


CASES = {"p1_images(N=210, n=13)": _p1_case, "short_vectors(disc 389, bound 400)": _short_case,
         "rank_mod_p(160x160)": _rank_case}


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    saved = _accel.USE_NUMBA
    print(f"{'kernel':38s} {'numba [s]':>10s} {'numpy [s]':>10s} {'ratio':>7s}")
    try:
        for name, make in CASES.items():
            fn = make()
            _accel.USE_NUMBA = True
            fast = fn()          # also compiles
            _accel.USE_NUMBA = False
            slow = fn()
            if not np.array_equal(np.asarray(fast), np.asarray(slow)):
                raise SystemExit(f"{name}: backends disagree")
            _accel.USE_NUMBA = True
            t_nb = _time(fn, args.repeat)
            _accel.USE_NUMBA = False
            t_np = _time(fn, args.repeat)
            print(f"{name:38s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:7.1f}x")
    finally:
        _accel.USE_NUMBA = saved


if __name__ == "__main__":
    main()
