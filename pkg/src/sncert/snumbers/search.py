"""Candidate generation, local refinement and deterministic fan-out.

Searches run in float arithmetic on a float copy of the operator; only the
winners are re-evaluated in the operator's own mode by the engines.
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from ..numerics.polytope import CapExceeded, PolytopeError
from ..numerics.scalar import Mode
from ..operators import OperatorError, OperatorMatrix
from ..spaces import SpaceError
from . import evaluate

log = logging.getLogger(__name__)

SNAP_DENOMINATORS = (6, 60, 2520, 10 ** 6)
BAD = math.inf


def rng_for(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng([seed, *tags])


def float_operator(T: OperatorMatrix) -> OperatorMatrix:
    return T.to_mode(Mode.FLOAT)


# ---------------------------------------------------------------------------
# float objectives (smaller is better; sup-type kinds are negated)


def objective(kind: str, T: OperatorMatrix, x: np.ndarray) -> float:
    try:
        if kind == "c":
            try:
                return evaluate.gelfand_float(T, x)
            except CapExceeded:
                return float(evaluate.gelfand_value(T, x, use_vertices=False))
        if kind == "d":
            try:
                return evaluate.kolmogorov_float(T, x)
            except CapExceeded:
                return float(evaluate.kolmogorov_value(T, x)[0])
        if kind == "b":
            return -evaluate.bernstein_float(T, x)
        if kind == "m":
            return -evaluate.mityagin_float(T, x)
    except (SpaceError, PolytopeError, OperatorError, ZeroDivisionError,
            np.linalg.LinAlgError) as exc:
        log.debug("candidate rejected: %s", exc)
        return BAD
    raise ValueError(f"no objective for kind {kind!r}")


def refine(kind: str, T: OperatorMatrix, x: np.ndarray, rounds: int, step: float = 0.5
           ) -> tuple[float, np.ndarray]:
    """Coordinate-wise perturbation with step halving.

    Each round tries ``x ± step e_i`` for every coordinate and moves to the
    best strict improvement (ties go to the lexicographically smaller
    vector); a round without improvement halves the step.
    """
    x = np.array(x, dtype=float)
    fx = objective(kind, T, x)
    for _ in range(rounds):
        best = None
        for i in range(x.size):
            for d in (-step, step):
                y = x.copy()
                y.flat[i] += d
                fy = objective(kind, T, y)
                if fy < fx and (best is None or (fy, tuple(y.flat)) < (best[0], tuple(best[1].flat))):
                    best = (fy, y)
        if best is None:
            step /= 2
        else:
            fx, x = best
    return fx, x


def _refine_task(args):
    kind, entries, weights, x, rounds = args
    T = OperatorMatrix.from_rows(entries, Mode.FLOAT, weights)
    return refine(kind, T, x, rounds)


def _objective_task(args):
    kind, entries, weights, x = args
    T = OperatorMatrix.from_rows(entries, Mode.FLOAT, weights)
    return objective(kind, T, x)


def parallel_map(fn, items, workers: int) -> list:
    """``map`` in input order, fanned out to processes when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(a) for a in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _payload(T: OperatorMatrix):
    w = T.domain.norm.weights
    return T.entries, (None if w is None else tuple(float(x) for x in w))


def evaluate_all(kind: str, Tf: OperatorMatrix, cands: list, workers: int) -> list[float]:
    E, w = _payload(Tf)
    return parallel_map(_objective_task, [(kind, E, w, x) for x in cands], workers)


def refine_all(kind: str, Tf: OperatorMatrix, starts: list, rounds: int, workers: int
               ) -> list[tuple[float, np.ndarray]]:
    E, w = _payload(Tf)
    return parallel_map(_refine_task, [(kind, E, w, x, rounds) for x in starts], workers)


def rank_candidates(values: list[float], cands: list, keep: int) -> list[tuple[float, np.ndarray]]:
    """The ``keep`` best (value, candidate) pairs, deterministic tie-break."""
    order = sorted(range(len(cands)), key=lambda i: (values[i], i))
    return [(values[i], cands[i]) for i in order[:keep] if values[i] < BAD]


# ---------------------------------------------------------------------------
# candidate families


def subsets(n_items: int, size: int, limit: int, rng: np.random.Generator,
            preferred: list[tuple] = ()) -> list[tuple]:
    """All ``size``-subsets when few enough, else preferred ones plus a sample."""
    if size > n_items or size < 0:
        return []
    total = math.comb(n_items, size)
    if total <= limit:
        return list(itertools.combinations(range(n_items), size))
    out = list(dict.fromkeys(tuple(sorted(p)) for p in preferred
                             if len(set(p)) == size and max(p, default=-1) < n_items))
    seen = set(out)
    while len(out) < limit:
        s = tuple(sorted(rng.choice(n_items, size=size, replace=False).tolist()))
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def preferred_subsets(n_items: int, size: int) -> list[tuple]:
    """Structured index sets: odd positions, leading block, even spread."""
    out = [tuple(range(0, 2 * size, 2)), tuple(range(size))]
    if size:
        step = n_items / size
        out.append(tuple(int(step * k + step / 2) for k in range(size)))
        out.append(tuple(range(n_items - size, n_items)))
    return out


def coordinate_rows(idx: tuple, dim: int) -> np.ndarray:
    M = np.zeros((len(idx), dim))
    for r, i in enumerate(idx):
        M[r, i] = 1.0
    return M


def random_matrix(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape)


# ---------------------------------------------------------------------------
# float -> exact


def snap(x: np.ndarray, max_den: int) -> np.ndarray:
    out = np.empty(np.shape(x), dtype=object)
    for idx, v in np.ndenumerate(np.asarray(x, dtype=float)):
        out[idx] = Fraction(v).limit_denominator(max_den)
    return out


def snapped_variants(x: np.ndarray, mode: Mode) -> list[np.ndarray]:
    """Rational roundings of a float candidate (just the candidate in float mode)."""
    if mode is Mode.FLOAT:
        return [np.asarray(x, dtype=float)]
    out, keys = [], set()
    for d in SNAP_DENOMINATORS:
        s = snap(x, d)
        key = tuple(s.flat)
        if key not in keys:
            keys.add(key)
            out.append(s)
    return out
