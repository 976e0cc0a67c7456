"""Summation and discretised Volterra matrices, operator norms, matrix files."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .numerics import linalg
from .numerics.scalar import (Mode, Scalar, as_array, format_scalar, from_scaled, mode_of,
                              parse_scalar, safe_matmul, scaled_int, to_mode, zeros)
from .spaces import SpaceError, VectorSpace, l1, linf, norm_of

SIGN_ENUM_CAP = 20


class OperatorError(ValueError):
    pass


class OperatorMatrix:
    """Dense matrix acting from a (weighted) l1 space into an l-infinity space.

    Exact matrices may be created from an integer-scaled form ``X / d``; the
    Fraction array is then only materialised when ``entries`` is read.
    """

    __slots__ = ("_entries", "_scaled", "domain", "codomain")

    def __init__(self, entries: np.ndarray | None, domain: VectorSpace, codomain: VectorSpace,
                 *, scaled: tuple[np.ndarray, int] | None = None):
        if entries is None and scaled is None:
            raise OperatorError("need entries or a scaled integer form")
        shape = entries.shape if entries is not None else scaled[0].shape
        if len(shape) != 2:
            raise OperatorError("entries must be a 2-d array")
        if shape != (codomain.dim, domain.dim):
            raise OperatorError(f"shape {shape} does not match {codomain.dim} x {domain.dim}")
        if domain.kind != "L1" or codomain.kind != "Linf":
            raise OperatorError("operators act from L1-kind into Linf-kind spaces")
        if domain.mode is not codomain.mode:
            raise OperatorError("domain and codomain use different scalar modes")
        if entries is not None:
            if mode_of(entries) is not domain.mode:
                raise OperatorError("entries and spaces use different scalar modes")
            entries = entries.copy()
            entries.flags.writeable = False
        elif domain.mode is not Mode.EXACT:
            raise OperatorError("scaled integer form is an exact representation")
        self._entries = entries
        self._scaled = scaled
        self.domain = domain
        self.codomain = codomain

    @property
    def entries(self) -> np.ndarray:
        if self._entries is None:
            E = from_scaled(*self._scaled)
            E.flags.writeable = False
            self._entries = E
        return self._entries

    def scaled(self) -> tuple[np.ndarray, int]:
        """Exact matrices: integer numerators and a common denominator."""
        if self._scaled is None:
            self._scaled = scaled_int(self.entries)
        return self._scaled

    def numeric(self) -> tuple[np.ndarray, Scalar]:
        """``(X, d)`` for vectorised arithmetic: scaled ints or floats over 1."""
        if self.mode is Mode.EXACT:
            return self.scaled()
        return self.entries, 1.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if (self.domain, self.codomain) != (other.domain, other.codomain):
            return False
        if self.mode is Mode.EXACT:
            (X, d), (Y, e) = self.scaled(), other.scaled()
            return bool(np.array_equal(X * e, Y * d))
        return bool(np.array_equal(self.entries, other.entries))

    __hash__ = None

    def __repr__(self) -> str:
        return f"OperatorMatrix({self.codomain.describe()} <- {self.domain.describe()}, {self.mode.value})"

    @classmethod
    def from_rows(cls, rows, mode: Mode = Mode.EXACT, weights=None) -> "OperatorMatrix":
        E = as_array(rows, mode)
        return cls(E, l1(E.shape[1], weights, mode), linf(E.shape[0], mode))

    @classmethod
    def from_scaled(cls, X: np.ndarray, den: int, weights=None) -> "OperatorMatrix":
        return cls(None, l1(X.shape[1], weights, Mode.EXACT), linf(X.shape[0], Mode.EXACT),
                   scaled=(X, den))

    @property
    def mode(self) -> Mode:
        return self.domain.mode

    @property
    def shape(self) -> tuple[int, int]:
        return (self.codomain.dim, self.domain.dim)

    def with_entries(self, entries: np.ndarray) -> "OperatorMatrix":
        return OperatorMatrix(entries, self.domain, self.codomain)

    def to_mode(self, mode: Mode) -> "OperatorMatrix":
        from .numerics.scalar import convert
        if mode is self.mode:
            return self
        w = self.domain.norm.weights
        if w is not None:
            w = [Fraction(x) if mode is Mode.EXACT else float(x) for x in w]
        return OperatorMatrix(convert(self.entries, mode), l1(self.domain.dim, w, mode),
                              linf(self.codomain.dim, mode))

    def rank(self) -> int:
        if self.mode is Mode.EXACT:
            X, _ = self.scaled()
            return linalg.rank(from_scaled(X, 1), Mode.EXACT)
        return linalg.rank(self.entries, self.mode)


def summation_matrix(N: int, mode: Mode = Mode.EXACT) -> OperatorMatrix:
    """Partial sums: ``(sigma x)_k = x_1 + ... + x_k`` truncated to ``N`` terms."""
    if N < 1:
        raise OperatorError("N must be at least 1")
    X = np.tril(np.ones((N, N), dtype=np.int64))
    return _from_int(X, 1, mode)


SCHEMES = ("right", "midpoint", "points")


@dataclass(frozen=True)
class VolterraGrid:
    """Uniform partition of [0, 1] into ``cells`` intervals plus sample points."""

    cells: int
    scheme: str = "right"
    points: tuple | None = None

    def __post_init__(self):
        if self.cells < 1:
            raise OperatorError("grid needs at least one cell")
        if self.scheme not in SCHEMES:
            raise OperatorError(f"unknown sample scheme {self.scheme!r}")
        if self.scheme == "points":
            if not self.points:
                raise OperatorError("explicit scheme needs sample points")
            pts = tuple(Fraction(p) if not isinstance(p, float) else p for p in self.points)
            if any(p < 0 or p > 1 for p in pts):
                raise OperatorError("sample points must lie in [0, 1]")
            if list(pts) != sorted(pts):
                raise OperatorError("sample points must be sorted")
            object.__setattr__(self, "points", pts)

    def samples(self) -> list:
        N = self.cells
        if self.scheme == "right":
            return [Fraction(k, N) for k in range(1, N + 1)]
        if self.scheme == "midpoint":
            return [Fraction(2 * k - 1, 2 * N) for k in range(1, N + 1)]
        return list(self.points)

    def cell(self, j: int) -> tuple[Fraction, Fraction]:
        """Interval ``I_j`` (1-based)."""
        return Fraction(j - 1, self.cells), Fraction(j, self.cells)


def volterra_matrix(grid: VolterraGrid, mode: Mode = Mode.EXACT) -> OperatorMatrix:
    """Integration ``f -> int_0^t f`` on step functions given by cell masses.

    Entry ``(k, j)`` is the fraction of cell ``I_j`` lying in ``[0, t_k]``, so
    the domain l1 norm is the L1 norm of the step function and the outputs
    are the values of the primitive at the sample points.
    """
    N = grid.cells
    j = np.arange(N, dtype=np.int64)[None, :]
    if grid.scheme == "right":
        X = np.clip(np.arange(1, N + 1, dtype=np.int64)[:, None] - j, 0, 1)
        return _from_int(X, 1, mode)
    if grid.scheme == "midpoint":
        X = np.clip(np.arange(1, 2 * N, 2, dtype=np.int64)[:, None] - 2 * j, 0, 2)
        return _from_int(X, 2, mode)
    rows = [[min(max(t * N - c, 0), 1) for c in range(N)] for t in grid.samples()]
    return OperatorMatrix.from_rows(rows, mode)


def _from_int(X: np.ndarray, den: int, mode: Mode) -> OperatorMatrix:
    if mode is Mode.EXACT:
        return OperatorMatrix.from_scaled(X, den)
    return OperatorMatrix.from_rows(X / den, mode)


@dataclass(frozen=True)
class OpNorm:
    value: Scalar
    witness: np.ndarray  # maximising extreme point of the domain ball


def op_norm(T: OperatorMatrix) -> OpNorm:
    """``max_j (1/w_j) max_i |T_ij|``; the maximum over the cross-polytope vertices."""
    mode = T.mode
    X, den = T.numeric()
    col = np.abs(X).max(axis=0)
    w = T.domain.weights
    if T.domain.weighted:
        vals = [_finish(c, den, mode) / wj for c, wj in zip(col, w)]
        best_j = max(range(len(vals)), key=lambda j: (vals[j], -j))
        best = vals[best_j]
    else:
        best_j = int(np.argmax(col))
        best = _finish(col[best_j], den, mode)
    e = zeros(T.domain.dim, mode)
    e[best_j] = 1 / w[best_j]
    return OpNorm(best, e)


def _finish(v, den, mode: Mode) -> Scalar:
    if mode is Mode.EXACT:
        return Fraction(int(v), int(den))
    return float(v) / den


def numeric_form(M: np.ndarray, mode: Mode):
    if mode is Mode.EXACT:
        return scaled_int(M)
    return np.asarray(M, dtype=float), 1.0


def matrix_norm(M: np.ndarray, dom: VectorSpace, cod: VectorSpace) -> Scalar:
    """Norm of ``M: dom -> cod`` for the polyhedral norm pairs used here.

    L1 domains: maximum over the cross-polytope vertices. Linf -> Linf: the
    maximal absolute row sum. Linf -> L1: maximum over sign vectors on the
    columns that are not identically zero.
    """
    if M.shape != (cod.dim, dom.dim):
        raise OperatorError(f"matrix shape {M.shape} does not map {dom.describe()} "
                            f"-> {cod.describe()}")
    X, den = numeric_form(M, dom.mode)
    return scaled_norm(X, den, dom, cod)


def scaled_norm(X: np.ndarray, den, dom: VectorSpace, cod: VectorSpace) -> Scalar:
    """:func:`matrix_norm` of ``X / den`` with ``X`` integer (exact) or float."""
    mode = dom.mode
    if X.size == 0:
        return to_mode(0, mode)
    A = np.abs(X)
    if dom.kind == "L1":
        if cod.kind == "Linf":
            col, cden = A.max(axis=0), den
        else:
            W, wd = numeric_form(cod.weights, mode)
            col, cden = safe_matmul(W[None, :], A)[0], den * wd
        if not dom.weighted:
            return _finish(col.max(), cden, mode)
        return max(_finish(c, cden, mode) / wj for c, wj in zip(col, dom.weights))
    if cod.kind == "Linf":
        ones = np.ones((A.shape[1], 1), dtype=A.dtype if A.dtype != object else np.int64)
        return _finish(safe_matmul(A, ones).max(), den, mode)
    live = np.flatnonzero(A.any(axis=0))
    if len(live) == 0:
        return to_mode(0, mode)
    if len(live) > SIGN_ENUM_CAP:
        raise OperatorError(f"Linf -> L1 norm needs 2^{len(live)} sign vectors")
    # s and -s give the same value, so fix the first sign
    S = np.array(list(itertools.product((1, -1), repeat=len(live) - 1)),
                 dtype=np.int64).reshape(2 ** (len(live) - 1), len(live) - 1)
    S = np.concatenate([np.ones((len(S), 1), dtype=np.int64), S], axis=1)
    if mode is Mode.FLOAT:
        S = S.astype(float)
    Y = np.abs(safe_matmul(X[:, live], S.T))
    W, wd = numeric_form(cod.weights, mode)
    return _finish(safe_matmul(W[None, :], Y)[0].max(), den * wd, mode)


def compose(A: np.ndarray, T: OperatorMatrix, B: np.ndarray) -> np.ndarray:
    """``A @ T @ B`` with shape checks."""
    if A.shape[1] != T.shape[0] or T.shape[1] != B.shape[0]:
        raise OperatorError(f"cannot chain {A.shape} . {T.shape} . {B.shape}")
    return A @ T.entries @ B


# ---------------------------------------------------------------------------
# matrix file format: "rows cols" then row-major entries

_EXACT_TOKEN = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_matrix(text: str, mode: Mode | None = None) -> np.ndarray:
    """Parse the text matrix format.

    Without an explicit ``mode`` the matrix is exact when every entry is an
    integer or ``p/q`` literal and float otherwise.
    """
    tokens = text.split()
    if len(tokens) < 2:
        raise OperatorError("matrix file needs a 'rows cols' header")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise OperatorError(f"bad matrix header: {exc}") from None
    body = tokens[2:]
    if rows < 0 or cols < 0 or len(body) != rows * cols:
        raise OperatorError(f"expected {rows * cols} entries, found {len(body)}")
    if mode is None:
        mode = Mode.EXACT if all(_EXACT_TOKEN.match(t) for t in body) else Mode.FLOAT
    try:
        vals = [parse_scalar(t, mode) for t in body]
    except (ValueError, ZeroDivisionError) as exc:
        raise OperatorError(f"bad matrix entry: {exc}") from None
    out = zeros((rows, cols), mode)
    for k, v in enumerate(vals):
        out[k // cols, k % cols] = v
    return out


def format_matrix(M: np.ndarray) -> str:
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    lines += [" ".join(format_scalar(x) for x in row) for row in M]
    return "\n".join(lines) + "\n"


def read_matrix(path: str | Path, mode: Mode | None = None) -> OperatorMatrix:
    E = parse_matrix(Path(path).read_text(), mode)
    m = mode_of(E)
    return OperatorMatrix(E, l1(E.shape[1], None, m), linf(E.shape[0], m))


def write_matrix(path: str | Path, M: np.ndarray) -> None:
    Path(path).write_text(format_matrix(M))


__all__ = ["OperatorMatrix", "OperatorError", "VolterraGrid", "OpNorm", "summation_matrix",
           "volterra_matrix", "op_norm", "matrix_norm", "compose", "parse_matrix",
           "format_matrix", "read_matrix", "write_matrix", "SpaceError"]
