"""Gaussian elimination that works on exact (object) and float arrays alike."""
from __future__ import annotations

import numpy as np

from .scalar import Mode, identity, mode_of, to_mode, zeros

RANK_TOL = 1e-10


def _tol(mode: Mode) -> float:
    return 0.0 if mode is Mode.EXACT else RANK_TOL


def rref(M: np.ndarray, mode: Mode | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    mode = mode or mode_of(M)
    tol = _tol(mode)
    R = M.copy()
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        col = np.abs(R[r:, c])
        k = int(np.argmax(col)) if mode is Mode.FLOAT else next(
            (i for i, x in enumerate(col) if x != 0), -1)
        if k < 0 or abs(R[r + k, c]) <= tol:
            continue
        k += r
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = R[r] / R[r, c]
        for i in range(rows):
            if i != r and R[i, c] != 0:
                R[i] = R[i] - R[i, c] * R[r]
        if mode is Mode.FLOAT:
            R[np.abs(R) < tol] = 0.0
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M: np.ndarray, mode: Mode | None = None) -> int:
    if M.size == 0:
        return 0
    return len(rref(M, mode)[1])


def nullspace(M: np.ndarray, mode: Mode | None = None) -> np.ndarray:
    """Columns spanning ker M (shape cols x nullity)."""
    mode = mode or mode_of(M)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return identity(cols, mode)
    R, pivots = rref(M, mode)
    free = [c for c in range(cols) if c not in pivots]
    K = zeros((cols, len(free)), mode)
    for j, f in enumerate(free):
        K[f, j] = to_mode(1, mode)
        for i, p in enumerate(pivots):
            K[p, j] = -R[i, f]
    return K


def solve(A: np.ndarray, b: np.ndarray, mode: Mode | None = None) -> np.ndarray | None:
    """Solve a square nonsingular system; ``None`` when singular."""
    mode = mode or mode_of(A)
    n = A.shape[0]
    aug = np.concatenate([A, b.reshape(n, -1)], axis=1)
    R, pivots = rref(aug, mode)
    if pivots[:n] != list(range(n)) or len(pivots) > n:
        return None
    x = R[:n, n:]
    return x.reshape(b.shape)


def inverse(A: np.ndarray, mode: Mode | None = None) -> np.ndarray | None:
    mode = mode or mode_of(A)
    return solve(A, identity(A.shape[0], mode), mode)


def column_basis(M: np.ndarray, mode: Mode | None = None) -> list[int]:
    """Indices of a maximal set of independent columns."""
    return rref(M, mode)[1]
