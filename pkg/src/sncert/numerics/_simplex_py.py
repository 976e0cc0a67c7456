"""Reference tableau simplex loop (Bland's rule).

Works on ``float64`` and exact ``object`` tableaux. The compiled twin in
``_simplex_ext`` implements the same loop for ``float64`` only and must
agree with this one pivot for pivot.
"""
from __future__ import annotations

import numpy as np

OPTIMAL, UNBOUNDED, ITERATION_LIMIT = 0, 1, 2


def pivot(T: np.ndarray, obj: np.ndarray, basis: np.ndarray, r: int, j: int) -> None:
    T[r] = T[r] / T[r, j]
    col = T[:, j]
    for i in np.nonzero(col)[0]:
        if i != r:
            T[i] = T[i] - col[i] * T[r]
    if obj[j] != 0:
        obj[:] = obj - obj[j] * T[r]
    basis[r] = j


def simplex_core(T: np.ndarray, obj: np.ndarray, basis: np.ndarray,
                 n_allowed: int, eps: float, max_iter: int) -> tuple[int, int]:
    """Minimise over the tableau in place.

    ``T`` is ``m x (ncols + 1)`` with the right-hand side last; ``obj`` holds
    reduced costs with ``-objective`` in the last slot. Only the first
    ``n_allowed`` columns may enter the basis.
    """
    m = T.shape[0]
    rhs = T.shape[1] - 1
    for it in range(max_iter):
        j = -1
        for k in range(n_allowed):
            if obj[k] < -eps:
                j = k
                break
        if j < 0:
            return OPTIMAL, it
        r = -1
        best = None
        for i in range(m):
            a = T[i, j]
            if a > eps:
                ratio = T[i, rhs] / a
                if r < 0 or ratio < best - eps or (ratio <= best + eps and basis[i] < basis[r]):
                    r, best = i, ratio
        if r < 0:
            return UNBOUNDED, it
        pivot(T, obj, basis, r, j)
    return ITERATION_LIMIT, max_iter
