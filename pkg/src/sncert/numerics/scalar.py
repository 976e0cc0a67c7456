"""Scalar modes: exact rationals (``Fraction``) or IEEE doubles.

Matrices and vectors are numpy arrays. Exact mode uses ``dtype=object``
holding :class:`fractions.Fraction` entries, float mode uses ``float64``.
The two are never mixed silently: helpers here raise :class:`MixedModeError`
when an exact array contains floats or the caller combines arrays of
different modes.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from numbers import Integral, Rational, Real
from typing import Iterable, Union

import numpy as np

Scalar = Union[Fraction, float]

# Feasibility / pivot tolerance for float-mode simplex.
LP_EPS = 1e-12
# Componentwise tolerance for deduplicating float vertices.
DEDUP_TOL = 1e-9
# Slack used when float-mode results are compared against each other.
COMPARE_TOL = 1e-9


class Mode(str, enum.Enum):
    EXACT = "exact"
    FLOAT = "float"

    @property
    def eps(self) -> float:
        return 0.0 if self is Mode.EXACT else LP_EPS


class MixedModeError(TypeError):
    """Raised when exact and floating values meet in one computation."""


def parse_scalar(text: str, mode: Mode | None = None) -> Scalar:
    """Parse ``'p/q'``, an integer, or a decimal literal.

    Rational and integer literals parse exactly unless ``mode`` is FLOAT.
    Decimal literals are exact in EXACT mode (``'0.1'`` becomes ``1/10``).
    """
    text = text.strip()
    if not text:
        raise ValueError("empty scalar literal")
    if mode is Mode.FLOAT:
        return float(Fraction(text)) if "/" in text else float(text)
    return Fraction(text)


def to_mode(x, mode: Mode) -> Scalar:
    """Convert one number into the representation used by ``mode``."""
    if mode is Mode.EXACT:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (Integral, Rational)) and not isinstance(x, bool):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        if isinstance(x, (float, np.floating)):
            raise MixedModeError(f"float {x!r} given where an exact scalar is required")
        raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")
    if isinstance(x, str):
        return parse_scalar(x, Mode.FLOAT)
    if isinstance(x, Real):
        return float(x)
    raise TypeError(f"cannot convert {type(x).__name__} to float")


def as_array(data, mode: Mode) -> np.ndarray:
    """Build a 1-d or 2-d array of ``mode`` scalars from nested sequences."""
    if isinstance(data, np.ndarray) and data.dtype != object:
        if mode is Mode.EXACT:
            if np.issubdtype(data.dtype, np.integer):
                conv = np.vectorize(Fraction, otypes=[object])
                return conv(data) if data.size else np.empty(data.shape, dtype=object)
            raise MixedModeError("float array given where exact scalars are required")
        return np.array(data, dtype=float)
    arr = np.array(data, dtype=object)
    if mode is Mode.FLOAT:
        out = np.empty(arr.shape, dtype=float)
        for idx, x in np.ndenumerate(arr):
            out[idx] = to_mode(x, mode)
        return out
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = to_mode(x, mode)
    return out


def mode_of(arr: np.ndarray) -> Mode:
    """Mode of an array; object arrays must hold only exact values."""
    if arr.dtype == object:
        for x in arr.flat:
            if not isinstance(x, Fraction):
                if isinstance(x, Integral) and not isinstance(x, bool):
                    continue
                raise MixedModeError(f"exact array contains {type(x).__name__} {x!r}")
        return Mode.EXACT
    if np.issubdtype(arr.dtype, np.floating):
        return Mode.FLOAT
    raise TypeError(f"unsupported dtype {arr.dtype}")


def common_mode(*arrays: np.ndarray) -> Mode:
    modes = {mode_of(a) for a in arrays}
    if len(modes) > 1:
        raise MixedModeError("arrays of different scalar modes combined")
    return modes.pop()


def zeros(shape, mode: Mode) -> np.ndarray:
    if mode is Mode.FLOAT:
        return np.zeros(shape, dtype=float)
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def identity(n: int, mode: Mode) -> np.ndarray:
    out = zeros((n, n), mode)
    for i in range(n):
        out[i, i] = to_mode(1, mode)
    return out


def convert(arr: np.ndarray, mode: Mode) -> np.ndarray:
    """Change the mode of an array. Floats become exact dyadic rationals."""
    if mode is Mode.FLOAT:
        if arr.dtype == object:
            return np.array([float(x) for x in arr.flat], dtype=float).reshape(arr.shape)
        return arr.astype(float)
    if arr.dtype == object:
        return arr
    conv = np.vectorize(Fraction, otypes=[object])
    return conv(arr) if arr.size else np.empty(arr.shape, dtype=object)


def format_scalar(x: Scalar) -> str:
    """``p/q`` for rationals, shortest round-trip decimal for floats."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Integral):
        return str(int(x))
    return repr(float(x))


def exact_from_float(x: float, max_den: int | None = None) -> Fraction:
    """Turn a search parameter into a rational (optionally simplified)."""
    f = Fraction(float(x))
    return f.limit_denominator(max_den) if max_den else f


def vec_key(v: Iterable, mode: Mode, tol: float = DEDUP_TOL) -> tuple:
    """Hashable key for deduplication: literal in EXACT, rounded in FLOAT."""
    if mode is Mode.EXACT:
        return tuple(Fraction(x) for x in v)
    return tuple(round(float(x) / tol) for x in v)


# ---------------------------------------------------------------------------
# integer-scaled form: an exact array as integer numerators over one denominator

INT64_SAFE = 2 ** 62


def _int_array(values, shape) -> np.ndarray:
    big = max((abs(v) for v in values), default=0)
    return np.array(values, dtype=np.int64 if big < INT64_SAFE else object).reshape(shape)


def scaled_int(M: np.ndarray) -> tuple[np.ndarray, int]:
    """``(X, d)`` with ``M == X / d`` exactly; ``X`` is int64 when it fits."""
    if M.dtype != object:
        if np.issubdtype(M.dtype, np.integer):
            return M.astype(np.int64), 1
        raise MixedModeError("scaled integer form needs an exact array")
    flat = [Fraction(x) for x in M.flat]
    den = math.lcm(*(f.denominator for f in flat)) if flat else 1
    return _int_array([f.numerator * (den // f.denominator) for f in flat], M.shape), den


def from_scaled(X: np.ndarray, den: int) -> np.ndarray:
    """Object array of Fractions ``X / den``."""
    out = np.empty(X.shape, dtype=object)
    if X.size:
        out[...] = _to_fraction(X, den)
    return out


def _frac_of(den):
    return np.frompyfunc(lambda v: Fraction(int(v), den), 1, 1)


def _to_fraction(X, den):
    return _frac_of(den)(X)


def safe_matmul(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Integer matrix product, promoted to Python ints when int64 could overflow."""
    if X.dtype.kind == "f" or Y.dtype.kind == "f":
        return X @ Y
    if X.dtype == object or Y.dtype == object:
        return X.astype(object) @ Y.astype(object)
    bx = int(np.abs(X).max()) if X.size else 0
    by = int(np.abs(Y).max()) if Y.size else 0
    if bx * by * max(1, X.shape[-1]) < INT64_SAFE:
        return X @ Y
    return X.astype(object) @ Y.astype(object)
