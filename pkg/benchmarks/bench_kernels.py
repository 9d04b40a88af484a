"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Prints one row per kernel with the best-of-``repeat`` wall time for each
backend and the speedup. The compiled column is skipped when the extension
is not built.
"""
import argparse
import time

import numpy as np

from nodimhelly import kernels
from nodimhelly.moduli import KIND_DELTA, KIND_ZETA


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _dykstra_args(seed=0, d=6, mh=12, mb=4):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(d) * 0.3
    A = rng.standard_normal((mh, d))
    b = A @ c + rng.uniform(0, 0.2, mh)
    C = c + rng.standard_normal((mb, d)) * 0.3
    r = np.linalg.norm(C - c, axis=1) + rng.uniform(0.05, 0.3, mb)
    return A, b, C, r, rng.standard_normal(d) * 3, 1e-12, 1e-10, 20000, 500


def _modulus_args(kind, eps, iters, seed=0, d=3, R=16):
    rng = np.random.default_rng(seed)
    Z0 = rng.standard_normal((R, 2 * d))
    Z0 /= np.linalg.norm(Z0.reshape(R, 2, d), axis=2).repeat(d, axis=1)
    return kind, 1.5, d, eps, Z0, rng.standard_normal((iters, R, 2 * d)), False


def cases(quick):
    K = 10_000 if quick else 100_000
    ts = np.linspace(0, 1, 201)
    zs = np.sqrt(1 + ts ** 2.5)
    zp = 1 + 0.4 * ts ** 2
    iters = 50 if quick else 300
    dk = _dykstra_args()
    zeta = _modulus_args(KIND_ZETA, 0.6, iters)
    dlt = _modulus_args(KIND_DELTA, 1.0, iters // 5)
    return [
        (f"rk_euclid K={K}", lambda m: m.rk_euclid(K)),
        (f"rk_table K={K}", lambda m: m.rk_table(ts, zs, 1.0, K)),
        ("Rk_euclid K=2000", lambda m: m.Rk_euclid(2000, 1e-12)),
        ("Rk_table K=2000", lambda m: m.Rk_table(ts, zp, 1.0, 2000, 1e-12)),
        ("dykstra_hb d=6, 16 sets", lambda m: m.dykstra_hb(*dk)),
        (f"modulus_search zeta x{iters}", lambda m: m.modulus_search(*zeta)),
        (f"modulus_search delta x{iters // 5}", lambda m: m.modulus_search(*dlt)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller problem sizes")
    args = ap.parse_args(argv)
    py = kernels.get_backend("python")
    cy = kernels.BACKENDS.get("cython")
    print(f"{'kernel':34s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases(args.quick):
        tp = _best(lambda: fn(py), args.repeat)
        if cy is None:
            print(f"{name:34s} {tp:11.4f} {'-':>11s} {'-':>8s}")
            continue
        tc = _best(lambda: fn(cy), args.repeat)
        print(f"{name:34s} {tp:11.4f} {tc:11.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
