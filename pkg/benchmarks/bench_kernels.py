"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--N 1000000] [--repeat 5]

Each kernel is run once untimed (numba compiles on first call), then
best-of-``repeat`` wall time is reported for both backends along with
the max abs difference of their outputs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from siegel_hecke.kernels import backend_module
from siegel_hecke.primes import prime_array


def _best(fn, args, repeat):
    out = fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _diff(a, b):
    if isinstance(a, tuple):
        return max(abs(x - y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


def cases(N: int, rng: np.random.Generator):
    primes = prime_array(N)
    t1, t2 = rng.uniform(0, np.pi, (2, len(primes)))
    u, v = 2 * np.cos(t1), 2 * np.cos(t2)
    a = u + v
    b = a * a - (2 + u * v) - 1.0 / primes
    kmax = int(np.log2(N)) + 1
    pp = backend_module("numpy").recurrence_table(a, b, 1.0 / primes, kmax)
    table = backend_module("numpy").multiplicative_table(N, primes, pp)
    M = 100_000
    sa, sb = rng.uniform(-4, 4, (2, M))
    tf = backend_module("numpy").recurrence_table(sa, sb, np.full(M, 0.5), 14)
    tg = backend_module("numpy").recurrence_table(sb, sa, np.full(M, 0.5), 14)
    Nc = min(N, 20_000)
    return {
        "recurrence_table": (a, b, 1.0 / primes, kmax),
        "multiplicative_table": (N, primes, pp),
        "dirichlet_convolve": (table[: Nc + 1].copy(), table[: Nc + 1][::-1].copy()),
        "first_joint_nonzero": (tf, tg, 1e-9),
        "min_abs_prefix": (tf, tg, np.full(M, 14, dtype=np.int64)),
        "sign_counts": (table, 1e-9),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    nb, npy = backend_module("numba"), backend_module("numpy")
    print(f"{'kernel':24s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, kargs in cases(args.N, np.random.default_rng(args.seed)).items():
        t_np, out_np = _best(getattr(npy, name), kargs, args.repeat)
        t_nb, out_nb = _best(getattr(nb, name), kargs, args.repeat)
        print(f"{name:24s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {_diff(out_np, out_nb):10.2e}")


if __name__ == "__main__":
    main()
