"""Certified evaluation of one candidate per s-number kind.

Every function works in the scalar mode of ``T``; in exact mode the value is
a rational computed without rounding, so inf-type values are certified
upper bounds and sup-type values certified lower bounds.
"""
from __future__ import annotations

import functools
import itertools
import math

import numpy as np

from ..numerics import linalg
from ..numerics.lp import LinearProgram, lp_solve
from ..numerics.polytope import (ZONOTOPE_CAP, CapExceeded, VPolytope, Zonotope, chambers, gauge,
                                 zonotope_vertices)
from ..numerics.scalar import Mode, Scalar, as_array, to_mode, zeros
from ..operators import OperatorMatrix, numeric_form, op_norm, scaled_norm
from ..spaces import SECTION_CAP, Subspace, linf_distance, norm_of, section_vertices

BERNSTEIN_EXACT_CAP = 4
EXACT_VERTEX_SOLVES = 20_000
FLOAT_VERTEX_SOLVES = 400_000


def independent_rows(M: np.ndarray, mode: Mode) -> np.ndarray:
    if M.shape[0] == 0:
        return M
    return M[linalg.column_basis(M.T.copy(), mode)]


def independent_cols(M: np.ndarray, mode: Mode) -> np.ndarray:
    if M.shape[1] == 0:
        return M
    return M[:, linalg.column_basis(M, mode)]


# ---------------------------------------------------------------------------
# inf-type kinds


def approximant_value(T: OperatorMatrix, F: np.ndarray) -> Scalar:
    """``|T - F|`` (no rank check)."""
    XT, dT = T.numeric()
    XF, dF = numeric_form(F, T.mode)
    if T.mode is Mode.EXACT:
        from ..witnesses import _scaled_sub
        return scaled_norm(_scaled_sub(XT, dF, XF, dT), dT * dF, T.domain, T.codomain)
    return scaled_norm(XT - XF, 1.0, T.domain, T.codomain)


def gelfand_value(T: OperatorMatrix, C: np.ndarray, use_vertices: bool | None = None) -> Scalar:
    """``sup{|Tx| : Cx = 0, |x| <= 1}``.

    Small domains enumerate the vertices of the section; otherwise the value
    is the dual form ``max_i min_u |T_i - u C|_{inf, 1/w}`` (equal by LP duality).
    """
    mode = T.mode
    C = independent_rows(C, mode)
    if C.shape[0] == 0:
        return op_norm(T).value
    if use_vertices is None:
        use_vertices = T.domain.dim <= SECTION_CAP
    if use_vertices:
        verts = section_vertices(T.domain, Subspace(T.domain, constraints=C))
        V = np.array(verts, dtype=C.dtype).T
        Y = T.entries @ V
        return max(abs(x) for x in Y.flat)
    return gelfand_dual(T, C)[0]


def gelfand_dual(T: OperatorMatrix, C: np.ndarray) -> tuple[Scalar, np.ndarray]:
    """Dual value and the approximant ``F = U C`` whose rows achieve it."""
    mode = T.mode
    w = T.domain.weights
    best = to_mode(0, mode)
    U = zeros((T.shape[0], C.shape[0]), mode)
    for i in range(T.shape[0]):
        q = linf_distance(T.entries[i], C.T.copy(), mode, weights=w)
        U[i] = q.minimizer
        best = max(best, q.dist)
    return best, U @ C


def kolmogorov_value(T: OperatorMatrix, W: np.ndarray) -> tuple[Scalar, np.ndarray]:
    """``max_j dist(T e_j / w_j, span W)`` and the approximant ``F = W Z``."""
    mode = T.mode
    W = independent_cols(W, mode)
    if W.shape[1] == 0:
        return op_norm(T).value, zeros(T.shape, mode)
    w = T.domain.weights
    Z = zeros((W.shape[1], T.shape[1]), mode)
    best = to_mode(0, mode)
    for j in range(T.shape[1]):
        q = linf_distance(T.entries[:, j] / w[j], W, mode)
        Z[:, j] = q.minimizer * w[j]
        best = max(best, q.dist)
    return best, W @ Z


# ---------------------------------------------------------------------------
# sup-type kinds


def bernstein_chambers(T: OperatorMatrix, B: np.ndarray) -> Scalar:
    """``min{|Tx| : x in span B, |x| = 1}`` by one LP per facet of the section.

    With ``g_i = w_i B_i`` the norm on ``span B`` is ``sum |g_i . y|``, linear on
    each chamber of the arrangement ``{g_i . y = 0}``; those chambers are the
    cones over the facets of the unit ball. Opposite chambers give equal
    values, so one of each pair is solved.
    """
    mode = T.mode
    n = B.shape[1]
    if linalg.rank(B, mode) < n:
        return to_mode(0, mode)
    if n > BERNSTEIN_EXACT_CAP:
        raise CapExceeded(f"exact Bernstein inner solve supports n <= {BERNSTEIN_EXACT_CAP}")
    w = T.domain.weights
    G = B * w[:, None]
    TB = T.entries @ B
    if n == 1:
        return norm_of(T.codomain, TB[:, 0]) / norm_of(T.domain, B[:, 0])
    tol = 0 if mode is Mode.EXACT else 1e-12
    nz = [i for i in range(len(G)) if any(abs(x) > tol for x in G[i])]
    Gz = G[nz]
    m = TB.shape[0]
    one = to_mode(1, mode)
    best = None
    for s in sorted(chambers(Gz, mode), reverse=True):
        if s[0] < 0:
            continue
        S = as_array(list(s), mode)
        c = zeros(n + 1, mode)
        c[n] = one
        A = zeros((2 * m + len(nz), n + 1), mode)
        A[:m, :n] = TB
        A[m:2 * m, :n] = -TB
        A[:2 * m, n] = -one
        A[2 * m:, :n] = -(S[:, None] * Gz)
        b = zeros(2 * m + len(nz), mode)
        A_eq = zeros((1, n + 1), mode)
        A_eq[0, :n] = S @ Gz
        res = lp_solve(LinearProgram(c, A_ub=A, b_ub=b, A_eq=A_eq, b_eq=as_array([one], mode)))
        if res.status != "optimal":
            continue
        if best is None or res.optimum < best:
            best = res.optimum
    return best if best is not None else to_mode(0, mode)


def bernstein_sampled(T: OperatorMatrix, B: np.ndarray, rng: np.random.Generator,
                      samples: int = 2000) -> float:
    """Smallest ratio over random directions: an estimate, not a certified bound."""
    Bf = np.array([[float(x) for x in row] for row in B])
    Tf = np.array([[float(x) for x in row] for row in T.entries])
    w = np.array([float(x) for x in T.domain.weights])
    Y = rng.standard_normal((B.shape[1], samples))
    X = Bf @ Y
    num = np.abs(Tf @ X).max(axis=0)
    den = (w[:, None] * np.abs(X)).sum(axis=0)
    return float((num / den).min())


def mityagin_zonotope(T: OperatorMatrix, Q: np.ndarray, cap: int = ZONOTOPE_CAP) -> Scalar:
    """Largest ``r`` with ``Q T B_X`` containing ``r Q B_Y`` for the quotient map ``Q``.

    ``Q B_Y`` is the zonotope spanned by the columns of ``Q``; the value is one
    over the largest gauge, in ``conv{±Q T e_j / w_j}``, of its vertices.
    A rank-deficient ``Q`` (quotient codimension below its row count) scores 0.
    """
    mode = T.mode
    k = Q.shape[0]
    if k == 0 or linalg.rank(Q, mode) < k:
        return to_mode(0, mode)
    tol = 0 if mode is Mode.EXACT else 1e-12
    G = np.array([g for g in Q.T if any(abs(x) > tol for x in g)], dtype=Q.dtype).reshape(-1, k)
    if len(G) > cap:
        raise CapExceeded(f"{len(G)} zonotope generators exceed cap {cap}")
    w = T.domain.weights
    images = (Q @ T.entries) / w[None, :]
    if linalg.rank(images, mode) < k:
        return to_mode(0, mode)
    P = VPolytope.symmetric_hull(images.T.copy())
    verts, _ = zonotope_vertices(Zonotope(G))
    worst = to_mode(0, mode)
    seen = set()
    for v in verts:
        key = tuple(v)
        if tuple(-x for x in v) in seen:
            continue
        seen.add(key)
        g = gauge(v, P)
        if g > worst:
            worst = g
    if worst == float("inf") or not worst:
        return to_mode(0, mode)
    return 1 / worst


# ---------------------------------------------------------------------------
# vectorised float forms used while searching


def _sign_matrix(k: int) -> np.ndarray:
    """All ``±1`` vectors of length ``k`` with first entry ``+1`` (rows)."""
    rows = [(1.0, *t) for t in itertools.product((1.0, -1.0), repeat=k - 1)] if k else [()]
    return np.array(rows, dtype=float).reshape(len(rows), k)


@functools.lru_cache(maxsize=64)
def _subset_index(r: int, k: int) -> np.ndarray:
    idx = np.array(list(itertools.combinations(range(r), k)), dtype=int).reshape(-1, k)
    idx.setflags(write=False)
    return idx


def _well_conditioned(mats: np.ndarray, ratio: float = 1e-8) -> np.ndarray:
    """Hadamard ratio ``|det M| / prod |row_i|`` above ``ratio``: cheap batched conditioning."""
    norms = np.linalg.norm(mats, axis=2).prod(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        h = np.abs(np.linalg.det(mats)) / norms
    return np.isfinite(h) & (h > ratio)


def polar_vertices(P: np.ndarray, mode: Mode = Mode.FLOAT, max_solves: int = FLOAT_VERTEX_SOLVES
                   ) -> np.ndarray | None:
    """Vertices of ``{a : |P a| <= 1}`` (``P`` is ``r x k``), or None when unbounded.

    Every vertex solves ``P_S a = s`` for some ``k`` independent rows ``S`` and
    signs ``s``; candidates violating another row are discarded. Only one of
    each ``±`` pair is returned. In exact mode a float pass discards the
    well-conditioned subsets whose vertices are all clearly infeasible and the
    rest are solved in rationals.
    """
    r, k = P.shape
    Pf = np.asarray(P, dtype=float)
    if np.linalg.matrix_rank(Pf) < k or (mode is Mode.EXACT and linalg.rank(P, mode) < k):
        return None
    subsets = _subset_index(r, k)
    S = _sign_matrix(k)
    if len(subsets) * len(S) > max_solves:
        raise CapExceeded(f"{len(subsets) * len(S)} vertex solves exceed {max_solves}")
    mats = Pf[subsets]  # (q, k, k)
    good = _well_conditioned(mats)
    sol = np.zeros((len(mats), len(S), k))
    if good.any():
        rhs = np.broadcast_to(S, (int(good.sum()),) + S.shape)[..., None]
        sol[good] = np.linalg.solve(mats[good][:, None, :, :], rhs)[..., 0]
    if mode is Mode.FLOAT:
        A = sol[good].reshape(-1, k)
        return A[(np.abs(A @ Pf.T) <= 1 + 1e-9).all(axis=1)]
    viol = np.abs(sol @ Pf.T).max(axis=2)  # (q, signs)
    out = []
    S_exact = as_array(S.T.astype(int).tolist(), mode)
    for q in range(len(subsets)):
        if good[q] and (viol[q] > 1 + 1e-6).all():
            continue
        inv = linalg.inverse(P[subsets[q]], mode)
        if inv is None:
            continue
        A = (inv @ S_exact).T
        feas = (np.abs(A @ P.T) <= 1).all(axis=1)
        out.extend(A[feas])
    return np.array(out, dtype=object).reshape(-1, k)


def vertex_solves(rows: int, k: int) -> int:
    """Linear solves ``polar_vertices`` needs for an ``rows x k`` system."""
    return math.comb(rows, k) * 2 ** max(k - 1, 0)


def vertex_cap(mode: Mode) -> int:
    return EXACT_VERTEX_SOLVES if mode is Mode.EXACT else FLOAT_VERTEX_SOLVES


def bernstein_value(T: OperatorMatrix, B: np.ndarray) -> Scalar:
    """``min{|Tx| : x in span B, |x| = 1}`` as ``1 / max{|By|_{1,w} : |T B y|_inf <= 1}``.

    The maximum of a convex function over the polytope ``{|TBy| <= 1}`` sits at a
    vertex. If ``T`` kills a direction of ``span B`` the polytope is unbounded
    and the value is 0. ``bernstein_chambers`` computes the same number by LPs.
    """
    mode = T.mode
    n = B.shape[1]
    if n == 0 or linalg.rank(B, mode) < n:
        return to_mode(0, mode)
    w = T.domain.weights
    cap = vertex_cap(mode)
    V = polar_vertices(T.entries @ B, mode, cap)
    if V is None or not len(V):
        return to_mode(0, mode)
    best = max(sum(wi * abs(x) for wi, x in zip(w, col)) for col in (B @ V.T).T)
    return 1 / best if best else to_mode(0, mode)


def mityagin_value(T: OperatorMatrix, Q: np.ndarray) -> Scalar:
    """Largest ``r`` with ``Q T B_X`` containing ``r Q B_Y``.

    The gauge of ``P = conv{±Q T e_j / w_j}`` is the largest ``a . v`` over
    vertices ``a`` of its polar, and the zonotope ``Q B_Y`` has support function
    ``sum_i |a . Q e_i|``; the value is one over the largest such sum. A
    rank-deficient ``Q`` or a lower-dimensional ``P`` scores 0.
    ``mityagin_zonotope`` computes the same number from zonotope vertices.
    """
    mode = T.mode
    k = Q.shape[0]
    if k == 0 or linalg.rank(Q, mode) < k:
        return to_mode(0, mode)
    w = T.domain.weights
    pts = ((Q @ T.entries) / w[None, :]).T
    cap = vertex_cap(mode)
    V = polar_vertices(pts, mode, cap)
    if V is None or not len(V):
        return to_mode(0, mode)
    best = max(sum(abs(x) for x in row) for row in V @ Q)
    return 1 / best if best else to_mode(0, mode)


def bernstein_float(T: OperatorMatrix, B: np.ndarray) -> float:
    """Float-only ``bernstein_value`` for search loops."""
    Tf = np.asarray(T.entries, dtype=float)
    w = np.asarray(T.domain.weights, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.linalg.matrix_rank(B) < B.shape[1]:
        return 0.0
    V = polar_vertices(Tf @ B)
    if V is None or not len(V):
        return 0.0
    best = (np.abs(V @ B.T) * w).sum(axis=1).max()
    return float(1.0 / best) if best > 0 else 0.0


def mityagin_float(T: OperatorMatrix, Q: np.ndarray) -> float:
    """Float-only ``mityagin_value`` for search loops."""
    Tf = np.asarray(T.entries, dtype=float)
    w = np.asarray(T.domain.weights, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if np.linalg.matrix_rank(Q) < Q.shape[0]:
        return 0.0
    pts = (Q @ Tf / w[None, :]).T
    V = polar_vertices(pts)
    if V is None or not len(V):
        return 0.0
    best = np.abs(V @ Q).sum(axis=1).max()
    return float(1.0 / best) if best > 0 else 0.0


NULL_LINE_SUBSETS = 250_000


def null_lines(K: np.ndarray, max_subsets: int = NULL_LINE_SUBSETS) -> np.ndarray:
    """Rows spanning every 1-dimensional ``ker K[:, S]``, for ``|S| = rank K + 1``.

    These are the directions of the vertices of ``{y : K y = 0, |y|_1 <= 1}``:
    a vertex lies on a face of the cross-polytope of dimension at most the
    codimension, and after reducing ``K`` to ``rho`` independent rows any
    smaller support extends to a ``rho + 1`` support with the same kernel
    line. Each line is the vector of signed ``rho x rho`` cofactors.
    """
    K = np.asarray(K, dtype=float)
    cols = K.shape[1]
    if K.size:
        _, sv, vt = np.linalg.svd(K, full_matrices=False)
        rho = int((sv > 1e-10 * max(1.0, sv.max(initial=0.0))).sum())
        K = sv[:rho, None] * vt[:rho]
    else:
        rho = 0
    if rho == 0:
        return np.eye(cols)
    if rho >= cols:
        return np.zeros((0, cols))
    total = math.comb(cols, rho + 1)
    if total > max_subsets:
        raise CapExceeded(f"{total} supports exceed {max_subsets}")
    idx = np.array(list(itertools.combinations(range(cols), rho + 1)), dtype=int)
    sub = np.transpose(K[:, idx], (1, 0, 2))  # (q, rho, rho + 1)
    drop = np.array([[j for j in range(rho + 1) if j != i] for i in range(rho + 1)])
    minors = sub[:, :, drop]  # (q, rho, rho + 1, rho)
    lam = np.linalg.det(np.transpose(minors, (0, 2, 1, 3)))  # (q, rho + 1)
    lam *= np.where(np.arange(rho + 1) % 2, -1.0, 1.0)
    size = np.abs(lam).max(axis=1)
    keep = size > 1e-12 * max(1.0, size.max(initial=0.0))
    L = np.zeros((int(keep.sum()), cols))
    L[np.arange(len(L))[:, None], idx[keep]] = lam[keep]
    return L


def kolmogorov_float(T: OperatorMatrix, W: np.ndarray) -> float:
    """Float-only ``kolmogorov_value``: ``max_j max_lambda |lambda . T e_j / w_j| / |lambda|_1``."""
    Tf = np.asarray(T.entries, dtype=float)
    w = np.asarray(T.domain.weights, dtype=float)
    L = null_lines(np.asarray(W, dtype=float).T)
    L = L / np.abs(L).sum(axis=1, keepdims=True)
    return float(np.abs(L @ (Tf / w[None, :])).max())


def gelfand_float(T: OperatorMatrix, C: np.ndarray) -> float:
    """Float-only ``gelfand_value``: largest ``|T x|`` over vertices ``x`` of the section."""
    Tf = np.asarray(T.entries, dtype=float)
    w = np.asarray(T.domain.weights, dtype=float)
    L = null_lines(np.asarray(C, dtype=float))
    L = L / (np.abs(L) * w[None, :]).sum(axis=1, keepdims=True)
    return float(np.abs(L @ Tf.T).max())
