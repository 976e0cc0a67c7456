"""Finite-dimensional weighted l1 and l-infinity spaces, subspaces, quotients."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .numerics import linalg
from .numerics.lp import LinearProgram, lp_solve
from .numerics.polytope import CapExceeded
from .numerics.scalar import (Mode, Scalar, as_array, common_mode, mode_of, to_mode,
                              vec_key, zeros)

SECTION_CAP = 14


class SpaceError(ValueError):
    pass


@dataclass(frozen=True)
class NormDescriptor:
    kind: str  # "L1" or "Linf"
    weights: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("L1", "Linf"):
            raise SpaceError(f"unknown norm kind {self.kind!r}")
        if self.weights is not None:
            if self.kind != "L1":
                raise SpaceError("weights are only supported for the L1 norm")
            if any(w <= 0 for w in self.weights):
                raise SpaceError("weights must be strictly positive")


@dataclass(frozen=True)
class VectorSpace:
    dim: int
    norm: NormDescriptor
    mode: Mode = Mode.EXACT

    def __post_init__(self):
        if self.dim < 1:
            raise SpaceError("dimension must be at least 1")
        w = self.norm.weights
        if w is not None:
            if len(w) != self.dim:
                raise SpaceError(f"{len(w)} weights for a space of dimension {self.dim}")
            object.__setattr__(self, "norm", NormDescriptor(
                "L1", tuple(to_mode(x, self.mode) for x in w)))

    @property
    def kind(self) -> str:
        return self.norm.kind

    @cached_property
    def weights(self) -> np.ndarray:
        """Weights as a read-only array (all ones when unweighted)."""
        w = self.norm.weights
        one = to_mode(1, self.mode)
        arr = as_array(list(w) if w is not None else [one] * self.dim, self.mode)
        arr.setflags(write=False)
        return arr

    @property
    def weighted(self) -> bool:
        return self.norm.weights is not None and any(w != 1 for w in self.norm.weights)

    def describe(self) -> str:
        if self.kind == "Linf":
            return f"linf_{self.dim}"
        if not self.weighted:
            return f"l1_{self.dim}"
        return f"l1_w{self.dim}[" + ",".join(str(w) for w in self.norm.weights) + "]"


def l1(dim: int, weights=None, mode: Mode = Mode.EXACT) -> VectorSpace:
    return VectorSpace(dim, NormDescriptor("L1", tuple(weights) if weights is not None else None), mode)


def linf(dim: int, mode: Mode = Mode.EXACT) -> VectorSpace:
    return VectorSpace(dim, NormDescriptor("Linf"), mode)


def norm_of(space: VectorSpace, v: np.ndarray) -> Scalar:
    if len(v) != space.dim:
        raise SpaceError(f"vector of length {len(v)} in a space of dimension {space.dim}")
    if space.kind == "Linf":
        return max(abs(x) for x in v)
    return sum((w * abs(x) for w, x in zip(space.weights, v)), to_mode(0, space.mode))


def ball_extreme_points(space: VectorSpace) -> list[np.ndarray]:
    """The ``2*dim`` points ``±e_j / w_j`` of a weighted cross-polytope."""
    if space.kind != "L1":
        raise SpaceError("extreme points are only enumerated for L1 balls")
    out = []
    for j, w in enumerate(space.weights):
        e = zeros(space.dim, space.mode)
        e[j] = 1 / w
        out += [e, -e]
    return out


@dataclass(frozen=True)
class Subspace:
    """A subspace held as basis columns (``basis``) or constraint rows (``constraints``).

    Exactly one representation is supplied; the other is derived on demand by
    an exact kernel computation.
    """

    ambient: VectorSpace
    basis: np.ndarray | None = None
    constraints: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if (self.basis is None) == (self.constraints is None):
            raise SpaceError("give exactly one of basis or constraints")
        mode = self.ambient.mode
        M = self.basis if self.basis is not None else self.constraints
        if M.ndim != 2:
            raise SpaceError("subspace data must be 2-d")
        if self.basis is not None:
            if M.shape[0] != self.ambient.dim:
                raise SpaceError("basis columns must live in the ambient space")
            if M.shape[1] and linalg.rank(M, mode) != M.shape[1]:
                raise SpaceError("basis is rank deficient")
        else:
            if M.shape[1] != self.ambient.dim:
                raise SpaceError("constraint rows must have ambient length")
            if M.shape[0] and linalg.rank(M, mode) != M.shape[0]:
                raise SpaceError("constraint rows are dependent")
        if M.size:
            common_mode(M)

    @property
    def dim(self) -> int:
        if self.basis is not None:
            return self.basis.shape[1]
        return self.ambient.dim - self.constraints.shape[0]

    @property
    def codim(self) -> int:
        return self.ambient.dim - self.dim

    def basis_form(self) -> np.ndarray:
        if self.basis is not None:
            return self.basis
        if "basis" not in self._cache:
            self._cache["basis"] = linalg.nullspace(self.constraints, self.ambient.mode)
        return self._cache["basis"]

    def constraint_form(self) -> np.ndarray:
        if self.constraints is not None:
            return self.constraints
        if "constraints" not in self._cache:
            mode = self.ambient.mode
            B = self.basis
            if B.shape[1] == 0:
                C = linalg.nullspace(zeros((0, self.ambient.dim), mode), mode).T
            else:
                C = linalg.nullspace(B.T.copy(), mode).T
            self._cache["constraints"] = np.ascontiguousarray(C)
        return self._cache["constraints"]


@dataclass(frozen=True)
class QuotientDistance:
    dist: Scalar
    minimizer: np.ndarray


def quotient_distance(ambient: VectorSpace, v: np.ndarray, sub: Subspace) -> QuotientDistance:
    """``min_z ||v - W z||_inf`` as one LP over ``(z, t)``."""
    if ambient.kind != "Linf":
        raise SpaceError("quotient distances are computed in l-infinity spaces")
    mode = common_mode(v, sub.basis_form()) if sub.dim else mode_of(v)
    W = sub.basis_form()
    if W.shape[1] == 0:
        return QuotientDistance(norm_of(ambient, v), zeros(0, mode))
    return linf_distance(v, W, mode)


def linf_distance(v: np.ndarray, W: np.ndarray, mode: Mode, weights: np.ndarray | None = None
                  ) -> QuotientDistance:
    """``min_z max_i |v_i - (W z)_i| / w_i``; weights default to one.

    Solved through the dual ``max v.y`` over ``W^T y = 0``, ``sum w_i |y_i| <= 1``
    (``k + 1`` rows instead of ``2N``); the minimiser ``z`` is read from the
    multipliers of the ``W^T y = 0`` rows and the optimum is re-checked
    against the primal residual.
    """
    N, k = W.shape
    one = to_mode(1, mode)
    w = weights if weights is not None else as_array([one] * N, mode)
    if k == 0:
        return QuotientDistance(max(abs(x) / wi for x, wi in zip(v, w)), zeros(0, mode))
    # y = p - q with p, q >= 0
    c = np.concatenate([v, -v])
    A_eq = zeros((k + 1, 2 * N), mode)
    A_eq[:k, :N] = W.T
    A_eq[:k, N:] = -W.T
    A_eq[k, :N] = w
    A_eq[k, N:] = w
    b_eq = zeros(k + 1, mode)
    b_eq[k] = one
    res = lp_solve(LinearProgram(c, A_eq=A_eq, b_eq=b_eq, sense="max", nonneg=(True,) * (2 * N)))
    if res.status != "optimal":
        raise SpaceError(f"distance LP ended with status {res.status}")
    tol = 0 if mode is Mode.EXACT else 1e-9 * max(1.0, abs(float(res.optimum)))
    best = None
    for z in (res.dual_eq[:k], -res.dual_eq[:k]):
        r = max(abs(x) / wi for x, wi in zip(v - W @ z, w))
        if best is None or r < best[0]:
            best = (r, z)
    r, z = best
    if abs(r - res.optimum) > tol:
        raise SpaceError("distance LP multipliers do not reproduce the optimum")
    return QuotientDistance(r, z)


def section_vertices(space: VectorSpace, constraints: Subspace, cap: int = SECTION_CAP
                     ) -> list[np.ndarray]:
    """Vertices of ``{x : Cx = 0, ||x||_{1,w} <= 1}``.

    A point of the section is a vertex iff the coordinate subspace of its
    support meets ``ker C`` in a line, so vertices are enumerated by support
    sets of size at most ``rank(C) + 1``.
    """
    if space.kind != "L1":
        raise SpaceError("sections are taken of L1 balls")
    if space.dim > cap:
        raise CapExceeded(f"section of a {space.dim}-dimensional ball exceeds cap {cap}")
    mode = space.mode
    C = constraints.constraint_form()
    w = space.weights
    c = C.shape[0]
    tol = 0 if mode is Mode.EXACT else 1e-12
    out: dict[tuple, np.ndarray] = {}
    for size in range(1, c + 2):
        for S in itertools.combinations(range(space.dim), size):
            sub = C[:, list(S)] if c else zeros((0, size), mode)
            K = linalg.nullspace(sub, mode) if c else None
            if c == 0:
                if size != 1:
                    continue
                z = as_array([to_mode(1, mode)], mode)
            else:
                if K.shape[1] != 1:
                    continue
                z = K[:, 0]
                if any(abs(x) <= tol for x in z):
                    continue
            x = zeros(space.dim, mode)
            for i, j in enumerate(S):
                x[j] = z[i]
            x = x / norm_of(space, x)
            for sgn in (x, -x):
                out.setdefault(vec_key(sgn, mode), sgn)
    return [out[k] for k in sorted(out, reverse=True)]
