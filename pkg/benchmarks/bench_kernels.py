"""Time the compiled and pure-numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--n 400] [--k 4] [--repeat 5]

Prints one line per kernel and backend with the best-of-``repeat`` wall time
and the speedup of the compiled backend. Results are checked for agreement.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from schain.kernels import BACKENDS


def inputs(n: int, k: int, m: int, seed: int):
    rng = np.random.default_rng(seed)
    A = np.triu(rng.random((n, n)) < 0.05, 1) * rng.random((n, n))
    W = A + A.T
    labels = rng.integers(0, k, n).astype(np.int64)
    U = rng.normal(size=(n, k))
    centers = rng.normal(size=(k, k))
    Nc = rng.random((k, m))
    Qc = rng.random((k, m))
    q0 = np.full(k, 1e-12)
    theta = rng.dirichlet(np.ones(m))
    return {
        "frac_eval": (Nc, Qc, q0, theta, 3.0, 1.0),
        "assign_labels": (U, centers),
        "cluster_edge_stats": (W, labels, k),
        "intra_component_counts": (W, labels, k),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return bool(np.allclose(a, b, rtol=1e-10, atol=1e-12))


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=400, help="objects")
    p.add_argument("--k", type=int, default=4, help="clusters")
    p.add_argument("--m", type=int, default=6, help="weights (meta-paths + attributes)")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    if "cython" not in BACKENDS:
        print("compiled backend not built; only timing the numpy fallback")
    data = inputs(args.n, args.k, args.m, args.seed)
    print(f"n={args.n} k={args.k} m={args.m} best of {args.repeat}")
    print(f"{'kernel':<24}{'backend':<9}{'seconds':>12}{'speedup':>10}")
    for name, call_args in data.items():
        times, outs = {}, {}
        for backend, mod in sorted(BACKENDS.items(), reverse=True):
            fn = getattr(mod, name)
            outs[backend] = fn(*call_args)
            number = 20 if name == "frac_eval" else 3
            times[backend] = min(timeit.repeat(lambda: fn(*call_args), number=number, repeat=args.repeat)) / number
        if len(outs) == 2 and not _same(outs["python"], outs["cython"]):
            raise SystemExit(f"backends disagree on {name}")
        for backend, t in times.items():
            speed = f"{times['python'] / t:.1f}x" if backend == "cython" else ""
            print(f"{name:<24}{backend:<9}{t:>12.6f}{speed:>10}")


if __name__ == "__main__":
    main()
