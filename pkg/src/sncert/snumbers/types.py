"""Kinds, certified intervals, certificates and search budgets."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..numerics.scalar import Scalar, format_scalar


class SNumberKind(str, enum.Enum):
    APPROXIMATION = "approximation"
    GELFAND = "gelfand"
    KOLMOGOROV = "kolmogorov"
    BERNSTEIN = "bernstein"
    MITYAGIN = "mityagin"
    ISOMORPHISM = "isomorphism"

    @property
    def inf_type(self) -> bool:
        """Candidates of inf-type kinds certify upper bounds."""
        return self in (SNumberKind.APPROXIMATION, SNumberKind.GELFAND, SNumberKind.KOLMOGOROV)

    @property
    def letter(self) -> str:
        return {"approximation": "a", "gelfand": "c", "kolmogorov": "d", "bernstein": "b",
                "mityagin": "m", "isomorphism": "i"}[self.value]

    @classmethod
    def parse(cls, text: str) -> "SNumberKind":
        t = text.strip().lower()
        for k in cls:
            if t in (k.value, k.letter):
                return k
        raise ValueError(f"unknown s-number kind {text!r}")


KIND_ORDER = (SNumberKind.APPROXIMATION, SNumberKind.GELFAND, SNumberKind.KOLMOGOROV,
              SNumberKind.BERNSTEIN, SNumberKind.MITYAGIN, SNumberKind.ISOMORPHISM)


@dataclass(frozen=True)
class Certificate:
    """One side of an interval: a value and the data that re-derives it.

    ``source`` names the witness type (``approximant``, ``gelfand_subspace``,
    ``kolmogorov_subspace``, ``bernstein_subspace``, ``mityagin_quotient``,
    ``factorization``, ``pigeonhole``, ``norm``, ``zero``, ``inequality``,
    ``import``); ``data`` holds its matrices and parameters.
    """

    wid: str
    source: str
    value: Scalar
    data: dict = field(default_factory=dict, compare=False)
    method: str = ""
    heuristic: bool = False


@dataclass(frozen=True)
class CertifiedInterval:
    kind: SNumberKind
    n: int
    lower: Scalar
    upper: Scalar
    lower_cert: Certificate
    upper_cert: Certificate
    heuristic: bool = False

    @property
    def methods(self) -> str:
        return f"{self.lower_cert.method}|{self.upper_cert.method}"

    @property
    def pinned(self) -> bool:
        return self.lower == self.upper

    def row(self) -> dict:
        return {"kind": self.kind.value, "n": self.n, "lower": format_scalar(self.lower),
                "upper": format_scalar(self.upper), "lower_witness_id": self.lower_cert.wid,
                "upper_witness_id": self.upper_cert.wid, "method": self.methods,
                "heuristic_flag": int(self.heuristic)}


@dataclass(frozen=True)
class SearchBudget:
    """Search effort. Equal budgets give equal results for any worker count."""

    candidates: int = 8
    refine_rounds: int = 20
    seed: int = 0
    workers: int = 1
    exhaustive_limit: int = 400
    refine_params: int = 48
    alternations: int = 6

    def __post_init__(self):
        if self.candidates < 0 or self.refine_rounds < 0 or self.workers < 1:
            raise ValueError("budget counts must be non-negative and workers >= 1")


class InconsistencyError(RuntimeError):
    """Certified bounds contradict a proven inequality: a bug, never a tolerance issue."""

    def __init__(self, message: str, dump: dict):
        super().__init__(message)
        self.dump = dump
