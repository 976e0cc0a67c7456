"""Polytope kernel: V-polytopes, gauges, zonotopes and facet enumeration."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import inf

import numpy as np

from . import linalg
from .lp import LinearProgram, lp_solve
from .scalar import DEDUP_TOL, Mode, Scalar, common_mode, mode_of, to_mode, vec_key, zeros

ZONOTOPE_CAP = 16


class PolytopeError(ValueError):
    pass


class CapExceeded(PolytopeError):
    pass


class DegenerateError(PolytopeError):
    def __init__(self, affine_dim: int, target_dim: int):
        super().__init__(f"points span an affine subspace of dimension {affine_dim}, "
                         f"expected {target_dim}")
        self.affine_dim = affine_dim


def dedup_rows(V: np.ndarray, mode: Mode) -> np.ndarray:
    seen: dict[tuple, int] = {}
    for i, row in enumerate(V):
        seen.setdefault(vec_key(row, mode), i)
    return V[sorted(seen.values())]


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of finitely many points (rows of ``vertices``)."""

    vertices: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        V = self.vertices
        if V.ndim != 2:
            raise PolytopeError("vertices must be a 2-d array")
        mode = mode_of(V)
        V = dedup_rows(V, mode)
        if self.symmetric:
            keys = {vec_key(r, mode) for r in V}
            missing = [r for r in V if vec_key(-r, mode) not in keys]
            if missing:
                raise PolytopeError("symmetric flag set but -v missing for some vertex")
        V.flags.writeable = False
        object.__setattr__(self, "vertices", V)

    @classmethod
    def symmetric_hull(cls, points: np.ndarray) -> "VPolytope":
        """``conv{±p}`` for the rows ``p`` of ``points`` (zero rows dropped)."""
        mode = mode_of(points)
        rows = [p for p in points if any(x != 0 for x in p)]
        if not rows:
            return cls(zeros((1, points.shape[1]), mode), symmetric=True)
        P = np.array(rows, dtype=points.dtype)
        return cls(np.concatenate([P, -P]), symmetric=True)

    @property
    def mode(self) -> Mode:
        return mode_of(self.vertices)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]


def gauge(point: np.ndarray, body: VPolytope) -> Scalar:
    """Minkowski functional ``min{t >= 0 : point in t*body}``.

    One LP over conic coefficients: ``min sum(mu)`` with ``V^T mu = point``,
    ``mu >= 0``. Infeasible (point outside the cone/affine hull) gives ``inf``.
    """
    mode = common_mode(point, body.vertices)
    V = body.vertices
    k = V.shape[0]
    one = to_mode(1, mode)
    c = np.array([one] * k, dtype=V.dtype)
    res = lp_solve(LinearProgram(c, A_eq=V.T.copy(), b_eq=point.copy(), nonneg=(True,) * k))
    if res.status == "infeasible":
        return inf
    if res.status != "optimal":
        raise PolytopeError(f"gauge LP ended with status {res.status}")
    return res.optimum


def contains(point: np.ndarray, body: VPolytope) -> bool:
    """Membership by a feasibility LP (independent of the gauge LP)."""
    mode = common_mode(point, body.vertices)
    V = body.vertices
    k = V.shape[0]
    one = to_mode(1, mode)
    A_eq = np.concatenate([V.T, np.array([[one] * k], dtype=V.dtype)])
    b_eq = np.concatenate([point, np.array([one], dtype=V.dtype)])
    res = lp_solve(LinearProgram(zeros(k, mode), A_eq=A_eq, b_eq=b_eq, nonneg=(True,) * k))
    return res.status == "optimal"


@dataclass(frozen=True)
class Zonotope:
    """Minkowski sum ``center + sum_i [-g_i, g_i]`` (generators are rows)."""

    generators: np.ndarray
    center: np.ndarray | None = None

    def __post_init__(self):
        G = self.generators
        if G.ndim != 2:
            raise PolytopeError("generators must be a 2-d array")
        mode = mode_of(G)
        c = self.center if self.center is not None else zeros(G.shape[1], mode)
        if G.size:
            common_mode(G, c)
        object.__setattr__(self, "center", c)

    @property
    def mode(self) -> Mode:
        return mode_of(self.generators)


def _normalize_direction(v: np.ndarray, mode: Mode) -> tuple:
    """Canonical key for the ray through ``v`` (positive scaling only)."""
    scale = max(abs(x) for x in v)
    if mode is Mode.EXACT:
        return tuple(Fraction(x) / scale for x in v)
    return tuple(round(float(x) / float(scale) / DEDUP_TOL) for x in v)


def _coordinates(vectors: np.ndarray, mode: Mode) -> np.ndarray:
    """Coordinates of the rows of ``vectors`` in a basis of their span."""
    piv = linalg.column_basis(vectors.T, mode)
    B = vectors[piv].T  # dim x r
    # least-squares free: solve on an independent row subset of B
    rows = linalg.column_basis(B.T, mode)
    Bs = B[rows]
    out = []
    for v in vectors:
        out.append(linalg.solve(Bs, v[rows], mode))
    return np.array(out, dtype=vectors.dtype).reshape(len(vectors), len(piv))


def _sign(x, tol):
    return 1 if x > tol else (-1 if x < -tol else 0)


def chambers(vectors: np.ndarray, mode: Mode) -> set[tuple[int, ...]]:
    """Sign vectors ``sign(<v_i, d>)`` over all generic directions ``d``.

    These are the chambers of the central hyperplane arrangement with normals
    ``v_i`` (all nonzero). Each chamber of a pointed arrangement contains an
    extreme ray; around each ray the local arrangement is solved recursively
    one dimension lower.
    """
    tol = 0 if mode is Mode.EXACT else DEDUP_TOL
    m = len(vectors)
    if m == 0:
        return {()}
    C = _coordinates(vectors, mode)
    r = C.shape[1]
    if r == 1:
        s = tuple(_sign(x, tol) for x in C[:, 0])
        return {s, tuple(-x for x in s)}
    rays: dict[tuple, np.ndarray] = {}
    for subset in itertools.combinations(range(m), r - 1):
        K = linalg.nullspace(C[list(subset)], mode)
        if K.shape[1] != 1:
            continue
        ray = K[:, 0]
        for d in (ray, -ray):
            rays.setdefault(_normalize_direction(d, mode), d)
    result: set[tuple[int, ...]] = set()
    for key in sorted(rays):
        d = rays[key]
        dots = C @ d
        fixed = [_sign(x, tol) for x in dots]
        zero_idx = [i for i, s in enumerate(fixed) if s == 0]
        for local in chambers(C[zero_idx], mode):
            s = list(fixed)
            for i, v in zip(zero_idx, local):
                s[i] = v
            result.add(tuple(s))
    return result


def zonotope_vertices(z: Zonotope, cap: int = ZONOTOPE_CAP) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Exact vertex set and, for each vertex, a generating ±1 sign vector."""
    G = z.generators
    mode = z.mode
    if G.shape[0] > cap:
        raise CapExceeded(f"{G.shape[0]} generators exceeds cap {cap}")
    nz = [i for i, g in enumerate(G) if any(abs(x) > (0 if mode is Mode.EXACT else DEDUP_TOL) for x in g)]
    if not nz:
        return np.array([z.center], dtype=G.dtype), [tuple(1 for _ in range(len(G)))]
    signs = sorted(chambers(G[nz], mode), reverse=True)
    verts, full_signs, seen = [], [], set()
    for s in signs:
        v = z.center.copy()
        for i, si in zip(nz, s):
            v = v + si * G[i]
        key = vec_key(v, mode)
        if key in seen:
            continue
        seen.add(key)
        verts.append(v)
        fs = [1] * len(G)
        for i, si in zip(nz, s):
            fs[i] = si
        full_signs.append(tuple(fs))
    return np.array(verts, dtype=G.dtype), full_signs


def brute_force_zonotope_points(z: Zonotope) -> np.ndarray:
    """All ``2^g`` sign combinations (oracle for small generator counts)."""
    G = z.generators
    pts = []
    for s in itertools.product((1, -1), repeat=len(G)):
        v = z.center.copy()
        for si, g in zip(s, G):
            v = v + si * g
        pts.append(v)
    return np.array(pts, dtype=G.dtype)


def affine_dimension(points: np.ndarray, mode: Mode | None = None) -> int:
    mode = mode or mode_of(points)
    if len(points) <= 1:
        return 0
    return linalg.rank(points[1:] - points[0], mode)


def hull_facets(points: np.ndarray, mode: Mode | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Irredundant H-representation ``A x <= b`` of ``conv(points)``, dim <= 4.

    Brute force over affinely independent ``dim``-subsets: each spans a
    hyperplane, kept if all points lie on one side. Facets are normalised so
    the largest normal coefficient has absolute value 1.
    """
    mode = mode or mode_of(points)
    d = points.shape[1]
    if d > 4:
        raise CapExceeded(f"hull_facets supports dimension <= 4, got {d}")
    P = dedup_rows(points, mode)
    adim = affine_dimension(P, mode)
    if adim < d:
        raise DegenerateError(adim, d)
    tol = 0 if mode is Mode.EXACT else DEDUP_TOL
    one = to_mode(1, mode)
    facets: dict[tuple, tuple[np.ndarray, Scalar]] = {}
    for subset in itertools.combinations(range(len(P)), d):
        M = np.concatenate([P[list(subset)], np.array([[-one]] * d, dtype=P.dtype)], axis=1)
        K = linalg.nullspace(M, mode)
        if K.shape[1] != 1:
            continue
        a, b = K[:d, 0], K[d, 0]
        vals = P @ a - b
        if all(v <= tol for v in vals):
            pass
        elif all(v >= -tol for v in vals):
            a, b = -a, -b
        else:
            continue
        scale = max(abs(x) for x in a)
        a, b = a / scale, b / scale
        key = vec_key(np.concatenate([a, [b]]), mode)
        facets.setdefault(key, (a, b))
    keys = sorted(facets)
    A = np.array([facets[k][0] for k in keys], dtype=P.dtype)
    b = np.array([facets[k][1] for k in keys], dtype=P.dtype)
    return A, b
