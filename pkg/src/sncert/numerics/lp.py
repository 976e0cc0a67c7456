"""Two-phase tableau simplex with Bland's rule and dual certificates.

Variables are free unless flagged non-negative. Every optimal solve returns
a primal point and a dual point whose objective values coincide; in exact
mode they coincide as rationals.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _simplex_py
from .scalar import Mode, MixedModeError, Scalar, as_array, common_mode, mode_of, zeros

try:
    if os.environ.get("SNCERT_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _simplex_ext
    _float_core = _simplex_ext.simplex_core
    BACKEND = "compiled"
except ImportError:
    _simplex_ext = None
    _float_core = _simplex_py.simplex_core
    BACKEND = "python"

MAX_ITER = 50_000


class LPError(ValueError):
    """Malformed linear program."""


@dataclass(frozen=True)
class LinearProgram:
    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    sense: str = "min"
    nonneg: tuple[bool, ...] | None = None

    def __post_init__(self):
        n = len(self.c)
        if self.sense not in ("min", "max"):
            raise LPError(f"unknown sense {self.sense!r}")
        arrays = [self.c]
        for A, b, tag in ((self.A_ub, self.b_ub, "ub"), (self.A_eq, self.b_eq, "eq")):
            if (A is None) != (b is None):
                raise LPError(f"{tag} rows need both matrix and right-hand side")
            if A is None:
                continue
            if A.ndim != 2 or A.shape[1] != n or A.shape[0] != len(b):
                raise LPError(f"{tag} rows have shape {A.shape} but c has {n} entries "
                              f"and rhs {len(b)}")
            arrays += [A, b]
        if self.nonneg is not None and len(self.nonneg) != n:
            raise LPError("nonneg flags must match the number of variables")
        common_mode(*[a for a in arrays if a.size])

    @property
    def mode(self) -> Mode:
        return mode_of(self.c) if self.c.size else Mode.EXACT

    @property
    def n(self) -> int:
        return len(self.c)


@dataclass(frozen=True)
class LPResult:
    status: str
    optimum: Scalar | None = None
    x: np.ndarray | None = None
    dual_ub: np.ndarray | None = None
    dual_eq: np.ndarray | None = None
    iterations: int = 0
    meta: dict = field(default_factory=dict, compare=False)


def _rows(A, b, n, mode):
    if A is None:
        return zeros((0, n), mode), zeros(0, mode)
    return A, b


def lp_solve(lp: LinearProgram) -> LPResult:
    """Solve ``lp``; status is ``optimal``, ``unbounded`` or ``infeasible``.

    Dual convention (minimisation): ``b_ub @ dual_ub + b_eq @ dual_eq`` equals
    the optimum, ``dual_ub <= 0`` and ``A^T y`` matches ``c`` on free
    variables (``<= c`` on non-negative ones). For maximisation all signs flip.
    """
    mode = lp.mode
    n = lp.n
    eps = mode.eps
    A_ub, b_ub = _rows(lp.A_ub, lp.b_ub, n, mode)
    A_eq, b_eq = _rows(lp.A_eq, lp.b_eq, n, mode)
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    nonneg = lp.nonneg or (False,) * n
    c = lp.c if lp.sense == "min" else -lp.c

    # structural columns: x+ (n), x- (free vars only), slacks (m_ub)
    free = [j for j in range(n) if not nonneg[j]]
    n_struct = n + len(free) + m_ub
    width = n_struct + m + 1
    T = zeros((m, width), mode)
    A = np.concatenate([A_ub, A_eq], axis=0) if m else zeros((0, n), mode)
    b = np.concatenate([b_ub, b_eq]) if m else zeros(0, mode)
    T[:, :n] = A
    for k, j in enumerate(free):
        T[:, n + k] = -A[:, j]
    for i in range(m_ub):
        T[i, n + len(free) + i] = 1
    T[:, -1] = b
    signs = np.ones(m, dtype=int)
    for i in range(m):
        if b[i] < 0:
            T[i] = -T[i]
            signs[i] = -1
    for i in range(m):
        T[i, n_struct + i] = 1
    if mode is Mode.EXACT:
        T = _fractionize(T)
    basis = np.arange(n_struct, n_struct + m, dtype=np.int64)

    core = _float_core if mode is Mode.FLOAT else _simplex_py.simplex_core
    if mode is Mode.FLOAT:
        T = np.ascontiguousarray(T, dtype=float)

    # phase 1: minimise the sum of artificials
    obj = zeros(width, mode)
    for i in range(m):
        obj = obj - T[i]
    for i in range(m):
        obj[n_struct + i] = 0
    if mode is Mode.FLOAT:
        obj = np.ascontiguousarray(obj, dtype=float)
    status, it1 = core(T, obj, basis, n_struct, eps, MAX_ITER)
    if status == _simplex_py.ITERATION_LIMIT:
        return LPResult("iteration_limit", iterations=it1)
    infeas_tol = 0 if mode is Mode.EXACT else 1e-9 * max([1.0] + [abs(float(v)) for v in b])
    if -obj[-1] > infeas_tol:
        return LPResult("infeasible", iterations=it1)
    # drive artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n_struct:
            row = T[r, :n_struct]
            cand = [j for j in range(n_struct) if abs(row[j]) > eps]
            if cand:
                _simplex_py.pivot(T, obj, basis, r, cand[0])

    # phase 2
    cvec = zeros(n_struct, mode)
    cvec[:n] = c
    for k, j in enumerate(free):
        cvec[n + k] = -c[j]
    obj = zeros(width, mode)
    obj[:n_struct] = cvec
    for r in range(m):
        j = basis[r]
        if j < n_struct and cvec[j] != 0:
            obj = obj - cvec[j] * T[r]
    if mode is Mode.FLOAT:
        obj = np.ascontiguousarray(obj, dtype=float)
    status, it2 = core(T, obj, basis, n_struct, eps, MAX_ITER)
    iters = it1 + it2
    if status == _simplex_py.UNBOUNDED:
        return LPResult("unbounded", iterations=iters)
    if status == _simplex_py.ITERATION_LIMIT:
        return LPResult("iteration_limit", iterations=iters)

    z = zeros(n_struct, mode)
    for r in range(m):
        if basis[r] < n_struct:
            z[basis[r]] = T[r, -1]
    x = z[:n].copy()
    for k, j in enumerate(free):
        x[j] = x[j] - z[n + k]
    # reduced cost of artificial i is -y_i for the sign-normalised rows
    y = -obj[n_struct:n_struct + m] * signs
    opt = c @ x if n else zeros(1, mode)[0]
    if lp.sense == "max":
        opt, y = -opt, -y
    if mode is Mode.EXACT:
        opt = Fraction(opt)
    else:
        opt = float(opt)
    return LPResult("optimal", opt, x, y[:m_ub], y[m_ub:], iters)


def _fractionize(T: np.ndarray) -> np.ndarray:
    out = np.empty(T.shape, dtype=object)
    for idx, v in np.ndenumerate(T):
        out[idx] = Fraction(v)
    return out


def certificate_gap(lp: LinearProgram, res: LPResult, tol: float = 0.0) -> dict:
    """Re-check primal feasibility, dual feasibility and the duality gap.

    Returns a dict of booleans plus the primal and dual objective values.
    """
    mode = lp.mode
    n = lp.n
    A_ub, b_ub = _rows(lp.A_ub, lp.b_ub, n, mode)
    A_eq, b_eq = _rows(lp.A_eq, lp.b_eq, n, mode)
    nonneg = lp.nonneg or (False,) * n
    x = res.x
    primal_ok = all(v <= tol for v in (A_ub @ x - b_ub)) if len(b_ub) else True
    primal_ok &= all(abs(v) <= tol for v in (A_eq @ x - b_eq)) if len(b_eq) else True
    primal_ok &= all(x[j] >= -tol for j in range(n) if nonneg[j])
    sgn = 1 if lp.sense == "min" else -1
    yu, ye = res.dual_ub, res.dual_eq
    dual_ok = all(sgn * v <= tol for v in yu)
    aty = (A_ub.T @ yu if len(yu) else zeros(n, mode)) + (A_eq.T @ ye if len(ye) else zeros(n, mode))
    for j in range(n):
        diff = sgn * (lp.c[j] - aty[j])
        if nonneg[j]:
            dual_ok &= diff >= -tol
        else:
            dual_ok &= abs(diff) <= tol
    primal = lp.c @ x
    dual = (b_ub @ yu if len(yu) else 0) + (b_eq @ ye if len(ye) else 0)
    return {"primal_feasible": bool(primal_ok), "dual_feasible": bool(dual_ok),
            "primal": primal, "dual": dual, "gap_closed": abs(primal - dual) <= tol}


def make_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, sense="min",
            nonneg=None, mode: Mode = Mode.EXACT) -> LinearProgram:
    """Convenience constructor from nested sequences."""
    def arr(v):
        return None if v is None else as_array(v, mode)
    if A_ub is not None and len(A_ub) == 0:
        A_ub = b_ub = None
    if A_eq is not None and len(A_eq) == 0:
        A_eq = b_eq = None
    return LinearProgram(arr(c), arr(A_ub), arr(b_ub), arr(A_eq), arr(b_eq),
                         sense, tuple(nonneg) if nonneg is not None else None)


__all__ = ["LinearProgram", "LPResult", "LPError", "lp_solve", "make_lp",
           "certificate_gap", "BACKEND", "MixedModeError"]
