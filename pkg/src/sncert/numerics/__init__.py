"""Scalar modes, exact linear programming and the polytope kernel."""
from .scalar import (Mode, MixedModeError, Scalar, as_array, convert, format_scalar,
                     mode_of, parse_scalar, to_mode)
from .lp import BACKEND, LinearProgram, LPError, LPResult, certificate_gap, lp_solve, make_lp

__all__ = [
    "Mode", "MixedModeError", "Scalar", "as_array", "convert", "format_scalar", "mode_of",
    "parse_scalar", "to_mode", "BACKEND", "LinearProgram", "LPError", "LPResult",
    "certificate_gap", "lp_solve", "make_lp",
]
