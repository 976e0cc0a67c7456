"""Compiled vs pure-Python simplex kernel on random feasible tableaux.

Usage: python benchmarks/bench_simplex.py [--sizes 10x20,20x40,40x80] [--reps 3]

Each tableau is ``max c x`` over ``A x <= b`` with ``b >= 0`` and a bounded
box, started from the slack basis. Both kernels run on copies of the same
tableaux; the script checks that they end at the same basis.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from sncert.numerics import _simplex_py, lp


def make_tableau(rng: np.random.Generator, m: int, k: int):
    A = rng.integers(-5, 6, size=(m, k)).astype(float)
    A = np.vstack([A, np.eye(k)])  # box x <= 10 keeps every instance bounded
    b = np.concatenate([rng.integers(0, 20, size=m), np.full(k, 10)]).astype(float)
    rows = m + k
    T = np.ascontiguousarray(np.concatenate([A, np.eye(rows), b[:, None]], axis=1))
    obj = np.ascontiguousarray(np.concatenate([-rng.integers(1, 6, size=k).astype(float),
                                               np.zeros(rows + 1)]))
    basis = np.arange(k, k + rows, dtype=np.int64)
    return T, obj, basis, k + rows


def run(core, tabs, reps):
    best = np.inf
    out = None
    for _ in range(reps):
        copies = [(T.copy(), o.copy(), b.copy(), n) for T, o, b, n in tabs]
        t0 = time.perf_counter()
        res = [core(T, o, b, n, 1e-12, 10_000) for T, o, b, n in copies]
        best = min(best, time.perf_counter() - t0)
        out = (res, [c[2] for c in copies])
    return best, out


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="10x20,20x40,40x80",
                   help="comma separated MxK constraint x variable counts")
    p.add_argument("--count", type=int, default=10, help="tableaux per size")
    p.add_argument("--reps", type=int, default=3, help="timing repetitions (best kept)")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if lp._simplex_ext is None:
        print("compiled kernel not available; only the Python loop can run")
    rng = np.random.default_rng(args.seed)
    print(f"{'size':>10} {'python s':>10} {'compiled s':>11} {'speedup':>8} {'pivots':>7}")
    for spec in args.sizes.split(","):
        m, k = (int(x) for x in spec.lower().split("x"))
        tabs = [make_tableau(rng, m, k) for _ in range(args.count)]
        tp, (rp, bp) = run(_simplex_py.simplex_core, tabs, args.reps)
        pivots = sum(int(r[1]) for r in rp)
        if lp._simplex_ext is None:
            print(f"{spec:>10} {tp:10.4f} {'-':>11} {'-':>8} {pivots:7d}")
            continue
        tc, (rc, bc) = run(lp._simplex_ext.simplex_core, tabs, args.reps)
        same = all(tuple(a) == tuple(b) for a, b in zip(rp, rc)) and \
            all((x == y).all() for x, y in zip(bp, bc))
        flag = "" if same else "  MISMATCH"
        print(f"{spec:>10} {tp:10.4f} {tc:11.4f} {tp / tc:8.1f} {pivots:7d}{flag}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
