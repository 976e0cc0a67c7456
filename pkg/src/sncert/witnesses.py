"""Constructive witnesses for bounds on s-numbers, with exact re-verification.

Every witness here is plain data (matrices, subspaces, index pairs) from which
the bound it certifies can be recomputed without trusting the producer.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .numerics import linalg
from .numerics.lp import LinearProgram, lp_solve
from .numerics.scalar import (INT64_SAFE, Mode, Scalar, as_array, format_scalar, parse_scalar,
                              safe_matmul, to_mode, zeros)
from .operators import (OperatorError, OperatorMatrix, VolterraGrid, numeric_form, format_matrix,
                        matrix_norm, op_norm, parse_matrix, scaled_norm)
from .spaces import SpaceError, Subspace, VectorSpace, l1, linf, norm_of


class WitnessError(ValueError):
    pass


# ---------------------------------------------------------------------------
# factorisations through an n-dimensional space


@dataclass(frozen=True)
class FactorizationWitness:
    """``A @ T @ B = Id`` on ``E_space``; certifies ``i_n(T) >= 1/(|A| |B|)``."""

    n: int
    A: np.ndarray
    B: np.ndarray
    E_space: VectorSpace
    normA: Scalar
    normB: Scalar

    @property
    def implied_bound(self) -> Scalar:
        return 1 / (self.normA * self.normB)


@dataclass(frozen=True)
class FactorizationCheck:
    ok: bool
    bound: Scalar
    normA: Scalar
    normB: Scalar
    offending: tuple | None = None


def build_factorization_discrete(n: int, N: int, mode: Mode = Mode.EXACT) -> FactorizationWitness:
    """Factor ``Id`` on ``linf_n`` through ``sigma_N``.

    ``A`` reads the odd coordinates ``1, 3, ..., 2n-1``; ``B`` sends ``y`` to
    ``(y_1, -y_1, ..., y_{n-1}, -y_{n-1}, y_n, 0, ...)``.
    """
    if n < 1 or N < 2 * n - 1:
        raise WitnessError(f"need N >= 2n-1 = {2 * n - 1}, got N = {N}")
    A = zeros((n, N), mode)
    B = zeros((N, n), mode)
    for k in range(n):
        A[k, 2 * k] = 1
        B[2 * k, k] = 1
        if k < n - 1:
            B[2 * k + 1, k] = -1
    A, B = as_array(A, mode), as_array(B, mode)
    E = linf(n, mode)
    return FactorizationWitness(n, A, B, E, matrix_norm(A, linf(N, mode), E),
                                matrix_norm(B, E, l1(N, None, mode)))


def build_factorization_volterra(n: int, N: int, mode: Mode = Mode.EXACT) -> FactorizationWitness:
    """Factor ``Id`` on the weighted space ``l1_{w,n}``, ``w = (2, ..., 2, 1)``,
    through the right-endpoint Volterra matrix on ``N`` cells.

    ``B`` puts alternating-sign unit heights on the ``2n-1`` equal blocks
    (as cell masses); ``A`` samples the primitive at ``(2k-1)/(2n-1)`` and
    scales by ``2n-1``.
    """
    blocks = 2 * n - 1
    if n < 1 or N < blocks or N % blocks:
        raise WitnessError(f"grid of {N} cells is not divisible by 2n-1 = {blocks}")
    m = N // blocks
    cell_mass = Fraction(1, N)
    A = zeros((n, N), mode)
    B = zeros((N, n), mode)
    for k in range(n):
        A[k, (2 * k + 1) * m - 1] = blocks
        for c in range(2 * k * m, (2 * k + 1) * m):
            B[c, k] = cell_mass
        if k < n - 1:
            for c in range((2 * k + 1) * m, (2 * k + 2) * m):
                B[c, k] = -cell_mass
    A, B = as_array(A, mode), as_array(B, mode)
    E = l1(n, [2] * (n - 1) + [1], mode)
    return FactorizationWitness(n, A, B, E, matrix_norm(A, linf(N, mode), E),
                                matrix_norm(B, E, l1(N, None, mode)))


def verify_factorization(w: FactorizationWitness, T: OperatorMatrix) -> FactorizationCheck:
    """Check ``A T B = Id`` exactly and recompute both norms from scratch."""
    mode = T.mode
    if w.A.shape[1] != T.shape[0] or w.B.shape[0] != T.shape[1] or w.A.shape[0] != w.B.shape[1]:
        raise WitnessError(f"witness shapes {w.A.shape}, {w.B.shape} do not chain with {T.shape}")
    if w.E_space.dim < w.n:
        raise WitnessError("E has dimension below n")
    A, B = _in_mode(w.A, mode), _in_mode(w.B, mode)
    E = w.E_space if w.E_space.mode is mode else _space_in_mode(w.E_space, mode)
    if E.dim != A.shape[0]:
        raise WitnessError(f"E has dimension {E.dim} but A has {A.shape[0]} rows")
    (XA, dA), (XT, dT), (XB, dB) = numeric_form(A, mode), T.numeric(), numeric_form(B, mode)
    P = safe_matmul(safe_matmul(XA, XT), XB)
    D = dA * dT * dB
    nA = scaled_norm(XA, dA, T.codomain, E)
    nB = scaled_norm(XB, dB, E, T.domain)
    bound = 1 / (nA * nB) if nA and nB else to_mode(0, mode)
    target = np.eye(P.shape[0], dtype=np.int64) * D
    if mode is Mode.EXACT:
        bad = np.argwhere(P != target)
    else:
        bad = np.argwhere(np.abs(P / D - np.eye(P.shape[0])) > 1e-9)
    if len(bad):
        i, j = (int(x) for x in bad[0])
        v = Fraction(int(P[i, j]), int(D)) if mode is Mode.EXACT else float(P[i, j] / D)
        return FactorizationCheck(False, to_mode(0, mode), nA, nB, (i, j, v))
    return FactorizationCheck(True, bound, nA, nB)


def coordinate_factorization(T: OperatorMatrix, rows, cols) -> FactorizationWitness | None:
    """``A`` selects ``rows``; ``B`` injects ``T[rows, cols]^{-1}`` on ``cols``.

    With ``E = linf_n`` this gives ``|A| = 1`` and ``|B|`` equal to the
    ``linf -> l1`` norm of the inverse submatrix.
    """
    mode = T.mode
    n = len(rows)
    sub = T.entries[np.ix_(rows, cols)]
    inv = linalg.inverse(sub, mode)
    if inv is None:
        return None
    A = zeros((n, T.shape[0]), mode)
    for k, r in enumerate(rows):
        A[k, r] = 1
    B = zeros((T.shape[1], n), mode)
    B[list(cols), :] = inv
    E = linf(n, mode)
    return FactorizationWitness(n, A, B, E, matrix_norm(A, T.codomain, E),
                                matrix_norm(B, E, T.domain))


def _in_mode(M: np.ndarray, mode: Mode) -> np.ndarray:
    from .numerics.scalar import convert
    return convert(M, mode)


def _space_in_mode(E: VectorSpace, mode: Mode) -> VectorSpace:
    if E.kind == "Linf":
        return linf(E.dim, mode)
    w = E.norm.weights
    return l1(E.dim, None if w is None else [Fraction(x) if mode is Mode.EXACT else float(x)
                                             for x in w], mode)


# ---------------------------------------------------------------------------
# low-rank approximants


@dataclass(frozen=True)
class ApproximantWitness:
    F: np.ndarray
    rank_bound: int
    deviation: Scalar


def approximant_deviation(T: OperatorMatrix, F: np.ndarray, F_scaled=None) -> Scalar:
    """``|T - F|`` exactly; ``F_scaled`` optionally gives ``F`` as ``(X, d)``."""
    mode = T.mode
    XT, dT = T.numeric()
    XF, dF = F_scaled if F_scaled is not None else numeric_form(F, mode)
    if mode is Mode.EXACT:
        diff = _scaled_sub(XT, dF, XF, dT)
        return scaled_norm(diff, dT * dF, T.domain, T.codomain)
    return scaled_norm(XT - XF / dF, 1.0, T.domain, T.codomain)


def _scaled_sub(X, a, Y, b):
    """``X*a - Y*b`` without int64 overflow."""
    big = max(int(np.abs(X).max(initial=0)) * a, int(np.abs(Y).max(initial=0)) * b)
    if big >= INT64_SAFE or X.dtype == object or Y.dtype == object:
        X, Y = X.astype(object), Y.astype(object)
    return X * a - Y * b


def rank_one_approximant(T: OperatorMatrix) -> ApproximantWitness:
    """Constant matrix with every entry ``1/2``: half the total mass, everywhere."""
    if T.domain.weighted:
        raise WitnessError("the constant approximant is defined for unweighted domains")
    half = to_mode(Fraction(1, 2), T.mode)
    F = np.full(T.shape, half, dtype=object if T.mode is Mode.EXACT else float)
    scaled = (np.ones(T.shape, dtype=np.int64), 2) if T.mode is Mode.EXACT else None
    return ApproximantWitness(F, 1, approximant_deviation(T, F, scaled))


def verify_approximant(w: ApproximantWitness, T: OperatorMatrix) -> tuple[bool, Scalar]:
    F = _in_mode(w.F, T.mode)
    if F.shape != T.shape:
        return False, to_mode(0, T.mode)
    dev = approximant_deviation(T, F)
    return linalg.rank(F, T.mode) <= w.rank_bound, dev


# ---------------------------------------------------------------------------
# Bernstein block subspace and trial families


def block_basis(n: int, N: int, mode: Mode = Mode.EXACT) -> np.ndarray:
    if n < 1 or N < 2 * n - 1:
        raise WitnessError(f"need N >= 2n-1 = {2 * n - 1}, got N = {N}")
    B = zeros((N, n), mode)
    for k in range(n):
        B[2 * k, k] = 1
        if k < n - 1:
            B[2 * k + 1, k] = -1
    return as_array(B, mode)


def bernstein_block_subspace(n: int, N: int, mode: Mode = Mode.EXACT) -> Subspace:
    """Span of ``e_1 - e_2, e_3 - e_4, ..., e_{2n-1}`` inside ``l1_N``."""
    return Subspace(l1(N, None, mode), basis=block_basis(n, N, mode))


@dataclass(frozen=True)
class TrialFamily:
    kind: str
    vectors: tuple  # each an ndarray of cell masses / coordinates

    def self_check(self, T: OperatorMatrix) -> dict:
        """Unit norms, pairwise l1 gaps of 2 and the images' pairwise sup gaps."""
        dom = T.domain
        norms = [norm_of(dom, v) for v in self.vectors]
        pairs = {}
        for (k, u), (l, v) in itertools.combinations(enumerate(self.vectors), 2):
            pairs[(k, l)] = (norm_of(dom, u - v), norm_of(T.codomain, T.entries @ (u - v)))
        return {"norms": norms, "pairs": pairs}


def trial_family(kind: str, count: int, N: int | None = None, grid: VolterraGrid | None = None,
                 mode: Mode = Mode.EXACT) -> TrialFamily:
    """Canonical vectors ``e^1..e^count`` or dyadic step functions.

    The dyadic member ``k`` (``k = 0, 1, ...``) is ``2^{k+1}`` times the
    indicator of ``(2^{-k-1}, 2^{-k})``, encoded by its masses on the cells of
    ``grid``; the grid must resolve ``2^{-count}``.
    """
    if kind == "canonical":
        N = N if N is not None else count
        if count > N:
            raise WitnessError("more canonical vectors than coordinates")
        vecs = []
        for k in range(count):
            e = zeros(N, mode)
            e[k] = 1
            vecs.append(as_array(e, mode))
        return TrialFamily(kind, tuple(vecs))
    if kind != "dyadic":
        raise WitnessError(f"unknown trial family {kind!r}")
    if grid is None:
        grid = VolterraGrid(2 ** count)
    cells = grid.cells
    if cells % (2 ** count):
        raise WitnessError(f"a {cells}-cell grid cannot represent {count} dyadic members")
    vecs = []
    for k in range(count):
        lo, hi = Fraction(1, 2 ** (k + 1)), Fraction(1, 2 ** k)
        height = 2 ** (k + 1)
        masses = []
        for j in range(1, cells + 1):
            a, b = grid.cell(j)
            overlap = max(Fraction(0), min(b, hi) - max(a, lo))
            masses.append(height * overlap)
        vecs.append(as_array(masses, mode))
    return TrialFamily(kind, tuple(vecs))


# ---------------------------------------------------------------------------
# pigeonhole lower bounds for Gelfand and Kolmogorov numbers


class PigeonholeError(WitnessError):
    pass


def integer_root(N: int, d: int) -> int:
    """Largest ``m`` with ``m**d <= N``."""
    m = int(round(N ** (1.0 / d)))
    while m ** d > N:
        m -= 1
    while (m + 1) ** d <= N:
        m += 1
    return m


@dataclass(frozen=True)
class PigeonholeTranscript:
    """Re-checkable record of a pigeonhole certificate.

    Covering step: ``count`` trial images lie in a ball of radius ``radius`` of
    a normed space of dimension ``dim``. If all pairwise distances exceeded
    ``net = 2*radius/(m-1)`` with ``m = floor(count**(1/dim))``, disjoint balls
    of radius ``net/2`` would fill a ball of radius ``radius + net/2`` and
    force ``count < m**dim``; hence a pair within ``net`` exists.

    Gelfand (``kind='gelfand'``): images are the halved quotient classes
    ``[e_k/w_k]/2`` in ``l1/M`` (radius 1/2); a pair ``k, l`` with
    ``f = (e_k/w_k - e_l/w_l)/2`` and ``eta = |[f]| <= net`` yields
    ``h in B_M`` with ``|Th| >= (|Tf| - |T| eta)/(1 + eta)``, so
    ``bound = (separation/2 - |T| net)/(1 + net)``.

    Kolmogorov (``kind='kolmogorov'``): images are best approximants ``g_k``
    of ``y_k = T e_k / w_k`` in ``W`` (radius ``2 max|y_k|``); a pair within
    ``net`` gives ``max(|y_k - g_k|, |y_l - g_l|) >= (|y_k - y_l| - net)/2``,
    so ``bound = (separation - net)/2``.

    ``demo_*`` fields hold the constructive collision on one reference
    subspace: the lexicographically first pair within ``net``.
    """

    kind: str
    n: int
    count: int
    dim: int
    radius: Scalar
    m: int
    net: Scalar
    separation: Scalar
    op_norm: Scalar
    bound: Scalar
    demo_subspace: np.ndarray | None = None
    demo_pair: tuple | None = None
    demo_gap: Scalar | None = None
    demo_value: Scalar | None = None
    demo_point: np.ndarray | None = None
    formula: str = ""


def _trial_images(T: OperatorMatrix) -> list[np.ndarray]:
    w = T.domain.weights
    return [T.entries[:, j] / w[j] for j in range(T.shape[1])]


def min_image_gap(T: OperatorMatrix) -> Scalar:
    """``min_{k<l} |T e_k / w_k - T e_l / w_l|_inf`` over all column pairs."""
    mode = T.mode
    if T.domain.weighted:
        ys = _trial_images(T)
        return min(norm_of(T.codomain, u - v) for u, v in itertools.combinations(ys, 2))
    X, den = T.numeric()
    best = None
    for k in range(X.shape[1] - 1):
        g = np.abs(X[:, k:k + 1] - X[:, k + 1:]).max(axis=0).min()
        best = g if best is None or g < best else best
    if mode is Mode.EXACT:
        return Fraction(int(best), int(den))
    return float(best)


def pigeonhole_lower_gelfand(T: OperatorMatrix, n: int, demo_constraints: np.ndarray | None = None
                             ) -> tuple[Scalar, PigeonholeTranscript | None]:
    mode = T.mode
    norm = op_norm(T).value
    if n == 1:
        return norm, None
    count, dim = T.shape[1], n - 1
    if count < 2:
        raise PigeonholeError("need at least two trial vectors")
    half = to_mode(Fraction(1, 2), mode)
    diffs_sep = min_image_gap(T)
    m = integer_root(count, dim)
    if m < 2:
        raise PigeonholeError(f"{count} trial vectors are too few in dimension {dim}")
    net = 2 * half / (m - 1)
    bound = (diffs_sep / 2 - norm * net) / (1 + net)
    if bound <= 0:
        raise PigeonholeError(f"net radius {net} too large for a positive bound")
    tr = PigeonholeTranscript(
        "gelfand", n, count, dim, half, m, net, diffs_sep, norm, bound,
        formula="(separation/2 - opnorm*net)/(1+net), net = 2*radius/(m-1)")
    if demo_constraints is not None:
        tr = _gelfand_demo(T, tr, demo_constraints)
    return bound, tr


def _quotient_l1_norm(y: np.ndarray, C: np.ndarray, dom: VectorSpace):
    """``min{|y - z|_{1,w} : C z = 0}`` and a minimiser ``z``."""
    mode = dom.mode
    N = dom.dim
    w = dom.weights
    # variables z (free, N) and u (N, >= 0) with -u <= y - z <= u
    c = zeros(2 * N, mode)
    c[N:] = w
    A = zeros((2 * N, 2 * N), mode)
    b = zeros(2 * N, mode)
    for i in range(N):
        A[2 * i, i] = -1
        A[2 * i, N + i] = -1
        b[2 * i] = -y[i]
        A[2 * i + 1, i] = 1
        A[2 * i + 1, N + i] = -1
        b[2 * i + 1] = y[i]
    A_eq = np.concatenate([C, zeros((C.shape[0], N), mode)], axis=1) if C.shape[0] else None
    b_eq = zeros(C.shape[0], mode) if C.shape[0] else None
    res = lp_solve(LinearProgram(c, A_ub=A, b_ub=b, A_eq=A_eq, b_eq=b_eq,
                                 nonneg=(False,) * N + (True,) * N))
    return res.optimum, res.x[:N]


def _gelfand_demo(T, tr, C):
    mode = T.mode
    dom = T.domain
    w = dom.weights
    count = T.shape[1]
    tol = 0 if mode is Mode.EXACT else 1e-9
    for k, l in itertools.combinations(range(count), 2):
        f = zeros(count, mode)
        f[k] += 1 / (2 * w[k])
        f[l] -= 1 / (2 * w[l])
        eta, g = _quotient_l1_norm(f, C, dom)
        if eta <= tr.net + tol:
            h = g / (1 + eta)
            value = norm_of(T.codomain, T.entries @ h)
            return _replace(tr, demo_subspace=C, demo_pair=(k, l), demo_gap=eta,
                            demo_value=value, demo_point=h)
    raise PigeonholeError("no colliding pair found; covering argument violated")


def pigeonhole_lower_kolmogorov(T: OperatorMatrix, n: int, demo_basis: np.ndarray | None = None
                                ) -> tuple[Scalar, PigeonholeTranscript | None]:
    mode = T.mode
    norm = op_norm(T).value
    if n == 1:
        return norm, None
    count, dim = T.shape[1], n - 1
    if count < 2:
        raise PigeonholeError("need at least two trial vectors")
    sep = min_image_gap(T)
    radius = 2 * norm
    m = integer_root(count, dim)
    if m < 2:
        raise PigeonholeError(f"{count} trial vectors are too few in dimension {dim}")
    net = 2 * radius / (m - 1)
    bound = (sep - net) / 2
    if bound <= 0:
        raise PigeonholeError(f"net radius {net} too large for a positive bound")
    tr = PigeonholeTranscript("kolmogorov", n, count, dim, radius, m, net, sep, norm, bound,
                              formula="(separation - net)/2, net = 2*radius/(m-1)")
    if demo_basis is not None:
        tr = _kolmogorov_demo(T, tr, demo_basis)
    return bound, tr


def _kolmogorov_demo(T, tr, W):
    from .spaces import linf_distance
    mode = T.mode
    ys = _trial_images(T)
    fits = [linf_distance(y, W, mode) for y in ys]
    gs = [W @ q.minimizer for q in fits]
    tol = 0 if mode is Mode.EXACT else 1e-9
    for k, l in itertools.combinations(range(len(ys)), 2):
        gap = norm_of(T.codomain, gs[k] - gs[l])
        if gap <= tr.net + tol:
            value = max(fits[k].dist, fits[l].dist)
            return _replace(tr, demo_subspace=W, demo_pair=(k, l), demo_gap=gap, demo_value=value)
    raise PigeonholeError("no colliding pair found; covering argument violated")


def _replace(tr, **kw):
    from dataclasses import replace
    return replace(tr, **kw)


def replay_transcript(tr: PigeonholeTranscript, T: OperatorMatrix) -> tuple[bool, Scalar]:
    """Recompute every step of a transcript against ``T``; returns (ok, bound)."""
    mode = T.mode
    tol = 0 if mode is Mode.EXACT else 1e-9
    if tr.kind == "gelfand":
        bound, fresh = pigeonhole_lower_gelfand(T, tr.n)
    elif tr.kind == "kolmogorov":
        bound, fresh = pigeonhole_lower_kolmogorov(T, tr.n)
    else:
        raise WitnessError(f"unknown transcript kind {tr.kind!r}")
    ok = fresh is not None and abs(bound - tr.bound) <= tol and fresh.m == tr.m \
        and abs(fresh.net - tr.net) <= tol
    if not ok or tr.demo_pair is None:
        return ok, bound
    k, l = tr.demo_pair
    if tr.kind == "gelfand":
        C = _in_mode(tr.demo_subspace, mode)
        w = T.domain.weights
        f = zeros(T.shape[1], mode)
        f[k] += 1 / (2 * w[k])
        f[l] -= 1 / (2 * w[l])
        eta, _ = _quotient_l1_norm(f, C, T.domain)
        h = _in_mode(tr.demo_point, mode)
        in_M = all(abs(x) <= tol for x in C @ h) if C.shape[0] else True
        value = norm_of(T.codomain, T.entries @ h)
        chain = (norm_of(T.codomain, T.entries @ f) - tr.op_norm * eta) / (1 + eta)
        ok = (abs(eta - tr.demo_gap) <= tol and eta <= tr.net + tol and in_M
              and norm_of(T.domain, h) <= 1 + tol and value + tol >= chain
              and chain + tol >= bound)
    else:
        from .spaces import linf_distance
        W = _in_mode(tr.demo_subspace, mode)
        ys = _trial_images(T)
        fk, fl = linf_distance(ys[k], W, mode), linf_distance(ys[l], W, mode)
        value = max(fk.dist, fl.dist)
        gap = norm_of(T.codomain, W @ fk.minimizer - W @ fl.minimizer)
        chain = (norm_of(T.codomain, ys[k] - ys[l]) - gap) / 2
        ok = gap <= tr.net + tol and value + tol >= chain and chain + tol >= bound
    return ok, bound


# ---------------------------------------------------------------------------
# text export


@dataclass
class WitnessRecord:
    kind: str
    fields: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)


def _space_text(E: VectorSpace) -> str:
    if E.kind == "Linf":
        return f"Linf {E.dim}"
    w = E.norm.weights
    if w is None:
        return f"L1 {E.dim}"
    return f"L1 {E.dim} " + ",".join(format_scalar(x) for x in w)


def _parse_space(text: str, mode: Mode) -> VectorSpace:
    parts = text.split()
    kind, dim = parts[0], int(parts[1])
    if kind == "Linf":
        return linf(dim, mode)
    w = [parse_scalar(x, mode) for x in parts[2].split(",")] if len(parts) > 2 else None
    return l1(dim, w, mode)


def to_record(w) -> WitnessRecord:
    if isinstance(w, FactorizationWitness):
        return WitnessRecord("factorization",
                             {"n": str(w.n), "E": _space_text(w.E_space),
                              "normA": format_scalar(w.normA), "normB": format_scalar(w.normB),
                              "bound": format_scalar(w.implied_bound)},
                             {"A": w.A, "B": w.B})
    if isinstance(w, ApproximantWitness):
        return WitnessRecord("approximant", {"rank_bound": str(w.rank_bound),
                                             "deviation": format_scalar(w.deviation)},
                             {"F": w.F})
    if isinstance(w, PigeonholeTranscript):
        fields = {"kind": w.kind, "n": str(w.n), "count": str(w.count), "dim": str(w.dim),
                  "radius": format_scalar(w.radius), "m": str(w.m), "net": format_scalar(w.net),
                  "separation": format_scalar(w.separation), "opnorm": format_scalar(w.op_norm),
                  "bound": format_scalar(w.bound), "formula": w.formula}
        mats = {}
        if w.demo_pair is not None:
            fields["pair"] = f"{w.demo_pair[0]} {w.demo_pair[1]}"
            fields["gap"] = format_scalar(w.demo_gap)
            fields["value"] = format_scalar(w.demo_value)
            mats["subspace"] = w.demo_subspace
            if w.demo_point is not None:
                mats["point"] = w.demo_point.reshape(-1, 1)
        return WitnessRecord("pigeonhole", fields, mats)
    raise WitnessError(f"cannot export {type(w).__name__}")


def export_witnesses(witnesses) -> str:
    out = ["# sncert witness file"]
    for w in witnesses:
        rec = w if isinstance(w, WitnessRecord) else to_record(w)
        out.append(f"begin {rec.kind}")
        for k, v in rec.fields.items():
            out.append(f"{k} {v}")
        for name, M in rec.matrices.items():
            out.append(f"matrix {name}")
            out.append(format_matrix(M).rstrip("\n"))
        out.append("end")
    return "\n".join(out) + "\n"


def parse_witness_file(text: str) -> list[WitnessRecord]:
    lines = [ln.rstrip() for ln in text.splitlines()]
    recs: list[WitnessRecord] = []
    i = 0
    cur: WitnessRecord | None = None
    while i < len(lines):
        ln = lines[i].strip()
        i += 1
        if not ln or ln.startswith("#"):
            continue
        if ln.startswith("begin "):
            if cur is not None:
                raise WitnessError(f"line {i}: nested begin")
            cur = WitnessRecord(ln.split(None, 1)[1])
        elif ln == "end":
            if cur is None:
                raise WitnessError(f"line {i}: end without begin")
            recs.append(cur)
            cur = None
        elif cur is None:
            raise WitnessError(f"line {i}: content outside a record")
        elif ln.startswith("matrix "):
            name = ln.split(None, 1)[1]
            header = lines[i].split()
            if len(header) != 2:
                raise WitnessError(f"line {i + 1}: bad matrix header")
            r = int(header[0])
            block = "\n".join(lines[i:i + r + 1])
            cur.matrices[name] = block
            i += r + 1
        else:
            key, _, val = ln.partition(" ")
            cur.fields[key] = val
    if cur is not None:
        raise WitnessError("unterminated record")
    return recs


def record_to_witness(rec: WitnessRecord, mode: Mode):
    """Rebuild a witness object; matrices are parsed in ``mode``."""
    try:
        mats = {k: parse_matrix(v, mode) if isinstance(v, str) else v
                for k, v in rec.matrices.items()}
        f = rec.fields
        if rec.kind == "factorization":
            E = _parse_space(f["E"], mode)
            return FactorizationWitness(int(f["n"]), mats["A"], mats["B"], E,
                                        parse_scalar(f["normA"], mode),
                                        parse_scalar(f["normB"], mode))
        if rec.kind == "approximant":
            return ApproximantWitness(mats["F"], int(f["rank_bound"]),
                                      parse_scalar(f["deviation"], mode))
        if rec.kind == "pigeonhole":
            pair = tuple(int(x) for x in f["pair"].split()) if "pair" in f else None
            point = mats.get("point")
            return PigeonholeTranscript(
                f["kind"], int(f["n"]), int(f["count"]), int(f["dim"]),
                parse_scalar(f["radius"], mode), int(f["m"]), parse_scalar(f["net"], mode),
                parse_scalar(f["separation"], mode), parse_scalar(f["opnorm"], mode),
                parse_scalar(f["bound"], mode), mats.get("subspace"), pair,
                parse_scalar(f["gap"], mode) if "gap" in f else None,
                parse_scalar(f["value"], mode) if "value" in f else None,
                point[:, 0] if point is not None else None, f.get("formula", ""))
    except (KeyError, ValueError, OperatorError, SpaceError) as exc:
        raise WitnessError(f"malformed {rec.kind} record: {exc}") from None
    raise WitnessError(f"unknown record kind {rec.kind!r}")


def verify_record(rec: WitnessRecord, T: OperatorMatrix) -> tuple[bool, str]:
    """Re-verify one exported witness against ``T``; returns (ok, message)."""
    mode = T.mode
    w = record_to_witness(rec, mode)
    tol = 0 if mode is Mode.EXACT else 1e-9
    try:
        if isinstance(w, FactorizationWitness):
            chk = verify_factorization(w, T)
            claimed = parse_scalar(rec.fields.get("bound", "0"), mode)
            ok = chk.ok and chk.bound + tol >= claimed
            msg = (f"factorization n={w.n}: identity {'holds' if chk.ok else 'FAILS'}"
                   + (f" at {chk.offending[:2]}" if chk.offending else "")
                   + f", bound {format_scalar(chk.bound)}")
            return ok, msg
        if isinstance(w, ApproximantWitness):
            rank_ok, dev = verify_approximant(w, T)
            ok = rank_ok and abs(dev - w.deviation) <= tol
            return ok, f"approximant rank<={w.rank_bound}: deviation {format_scalar(dev)}"
        ok, bound = replay_transcript(w, T)
        return ok, f"pigeonhole {w.kind} n={w.n}: bound {format_scalar(bound)}"
    except (WitnessError, OperatorError, SpaceError) as exc:
        return False, f"{rec.kind}: {exc}"
