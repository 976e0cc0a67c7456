"""Interval-level checks of the s-number axioms on random small matrices.

An axiom instance is PASS when the certified intervals force the inequality,
FAIL when they contradict it and INDETERMINATE otherwise. Only FAIL points
at a bug; INDETERMINATE outcomes are counted and reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from ..numerics.scalar import Mode, as_array, format_scalar
from ..operators import OperatorMatrix, matrix_norm
from ..spaces import l1, linf
from .engine import solver_for
from .types import KIND_ORDER, SearchBudget, SNumberKind

PASS, INDETERMINATE, FAIL, UNSUPPORTED = "PASS", "INDETERMINATE", "FAIL", "UNSUPPORTED"
AXIOMS = ("S1", "S2", "S3", "S4", "S5", "S6")
DEFAULT_AXIOMS = ("S1", "S2", "S3", "S5")
AXIOM_BUDGET = SearchBudget(candidates=2, refine_rounds=0, alternations=2)
S23_ORDERS = (1, 2)

Sampler = Callable[[np.random.Generator], OperatorMatrix]


@dataclass
class AxiomTally:
    axiom: str
    counts: dict = field(default_factory=lambda: {PASS: 0, INDETERMINATE: 0, FAIL: 0,
                                                  UNSUPPORTED: 0})
    failures: list = field(default_factory=list)
    note: str = ""

    def add(self, outcome: str, detail: dict | None = None) -> None:
        self.counts[outcome] += 1
        if outcome == FAIL and detail is not None:
            self.failures.append(detail)

    @property
    def decided(self) -> int:
        return self.counts[PASS] + self.counts[INDETERMINATE] + self.counts[FAIL]

    @property
    def indeterminate_rate(self) -> float:
        return self.counts[INDETERMINATE] / self.decided if self.decided else 0.0


@dataclass
class AxiomReport:
    kinds: tuple
    sampler: str
    trials: int
    seed: int
    tallies: dict[str, AxiomTally]

    @property
    def ok(self) -> bool:
        return all(t.counts[FAIL] == 0 for t in self.tallies.values())

    def lines(self) -> list[str]:
        out = []
        for name, t in self.tallies.items():
            c = t.counts
            line = (f"{name}: PASS={c[PASS]} INDETERMINATE={c[INDETERMINATE]} FAIL={c[FAIL]}"
                    f" UNSUPPORTED={c[UNSUPPORTED]} indeterminate_rate={t.indeterminate_rate:.3f}")
            if t.note:
                line += f" ({t.note})"
            out.append(line)
        return out


# ---------------------------------------------------------------------------
# samplers


def _rational_matrix(rng: np.random.Generator, rows: int, cols: int, span: int = 5,
                     den: int = 4) -> np.ndarray:
    num = rng.integers(-span, span + 1, size=(rows, cols))
    dd = rng.integers(1, den + 1, size=(rows, cols))
    return as_array([[Fraction(int(a), int(b)) for a, b in zip(r1, r2)]
                     for r1, r2 in zip(num, dd)], Mode.EXACT)


def random_sampler(dims: Iterable[int] = (3, 4)) -> Sampler:
    """Random rational ``d x d`` matrices, cycling through ``dims``."""
    dims = tuple(dims)
    state = {"i": 0}

    def sample(rng):
        d = dims[state["i"] % len(dims)]
        state["i"] += 1
        return OperatorMatrix(_rational_matrix(rng, d, d), l1(d), linf(d))
    return sample


def rank_deficient_sampler(dims: Iterable[int] = (3, 4)) -> Sampler:
    """Products ``(d x d-1)(d-1 x d)`` of random rational factors: rank at most ``d - 1``."""
    dims = tuple(dims)
    state = {"i": 0}

    def sample(rng):
        d = dims[state["i"] % len(dims)]
        state["i"] += 1
        M = _rational_matrix(rng, d, d - 1, span=3, den=2) @ _rational_matrix(rng, d - 1, d,
                                                                              span=3, den=2)
        return OperatorMatrix(M, l1(d), linf(d))
    return sample


def identity_sampler(dims: Iterable[int] = (2, 3, 4)) -> Sampler:
    dims = tuple(dims)
    state = {"i": 0}

    def sample(rng):
        d = dims[state["i"] % len(dims)]
        state["i"] += 1
        M = as_array([[int(i == j) for j in range(d)] for i in range(d)], Mode.EXACT)
        return OperatorMatrix(M, l1(d), linf(d))
    return sample


SAMPLERS = {"random": random_sampler, "random3": lambda: random_sampler((3,)),
            "random4": lambda: random_sampler((4,)), "rank-deficient": rank_deficient_sampler,
            "identity": identity_sampler}


# ---------------------------------------------------------------------------
# comparisons


def _le(lo_side, hi_side, lo_scale=1, hi_scale=1, shift=0) -> str:
    """Outcome of ``x <= y`` with ``x`` in ``lo_side`` and ``y`` in ``hi_side``.

    ``x`` is scaled by ``lo_scale``, ``y`` by ``hi_scale`` then shifted by ``shift``.
    """
    (xl, xu), (yl, yu) = lo_side, hi_side
    if lo_scale * xu <= hi_scale * yl + shift:
        return PASS
    if lo_scale * xl > hi_scale * yu + shift:
        return FAIL
    return INDETERMINATE


def _iv(solver, kind, n):
    iv = solver.interval(kind, n)
    return iv.lower, iv.upper


def _project_rank(T: OperatorMatrix, rng: np.random.Generator) -> OperatorMatrix:
    """``T`` composed with a random rational rank ``d - 1`` map."""
    d = T.shape[1]
    P = _rational_matrix(rng, d, d - 1, span=3, den=2) @ _rational_matrix(rng, d - 1, d,
                                                                          span=3, den=2)
    return T.with_entries(T.entries @ P)


def _detail(axiom, kind, n, trial, **mats) -> dict:
    out = {"axiom": axiom, "kind": kind.value, "n": n, "trial": trial}
    for name, M in mats.items():
        out[name] = [[format_scalar(x) for x in row] for row in M]
    return out


# ---------------------------------------------------------------------------
# driver


def axiom_check(kind: SNumberKind | Iterable[SNumberKind] | None = None,
                sampler: Sampler | str = "random", trials: int = 100, seed: int = 0,
                budget: SearchBudget | None = None, axioms: Iterable[str] = DEFAULT_AXIOMS
                ) -> AxiomReport:
    """Run the requested axioms on ``trials`` sampled matrices.

    (S1) n = 1 degenerate at the norm and ``s_n >= s_{n+1}``; (S2) both
    directions of ``|s_n(T + S) - s_n(T)| <= |S|``; (S3) ``s_n(B T A) <=
    |B| s_n(T) |A|``; (S5) ``s_n = 0`` for ``n`` above the rank. (S4) and (S6)
    concern ``Id: E -> E``, which the engines do not represent for the
    l1 -> linf norm pair, so they are reported unsupported.
    """
    if kind is None:
        kinds = KIND_ORDER
    elif isinstance(kind, SNumberKind):
        kinds = (kind,)
    else:
        kinds = tuple(kind)
    name = sampler if isinstance(sampler, str) else getattr(sampler, "__name__", "custom")
    if isinstance(sampler, str):
        sampler = SAMPLERS[sampler]()
    budget = replace(budget or AXIOM_BUDGET, seed=seed)
    axioms = tuple(axioms)
    tallies = {a: AxiomTally(a) for a in axioms}
    for a in ("S4", "S6"):
        if a in tallies:
            tallies[a].note = "Id: E -> E is outside the l1 -> linf norm pair"
    rng = np.random.default_rng([seed, 17])
    for trial in range(trials):
        T = sampler(rng)
        d = min(T.shape)
        sol = solver_for(T, budget)
        if "S1" in tallies:
            t = tallies["S1"]
            for k in kinds:
                lo, up = _iv(sol, k, 1)
                ok = lo == up == sol.norm
                t.add(PASS if ok else FAIL,
                      None if ok else _detail("S1", k, 1, trial, T=T.entries))
                for n in range(1, d):
                    out = _le(_iv(sol, k, n + 1), _iv(sol, k, n))
                    t.add(out, _detail("S1", k, n, trial, T=T.entries))
        if "S2" in tallies:
            S = _rational_matrix(rng, *T.shape, span=1, den=4)
            TS = T.with_entries(T.entries + S)
            s_norm = matrix_norm(S, T.domain, T.codomain)
            sol2 = solver_for(TS, budget)
            for k in kinds:
                for n in S23_ORDERS:
                    for a, b in ((sol2, sol), (sol, sol2)):
                        out = _le(_iv(a, k, n), _iv(b, k, n), shift=s_norm)
                        tallies["S2"].add(out, _detail("S2", k, n, trial, T=T.entries, S=S))
        if "S3" in tallies:
            Am = _rational_matrix(rng, T.shape[1], T.shape[1], span=2, den=3)
            Bm = _rational_matrix(rng, T.shape[0], T.shape[0], span=2, den=3)
            BTA = T.with_entries(Bm @ T.entries @ Am)
            nA = matrix_norm(Am, T.domain, T.domain)
            nB = matrix_norm(Bm, T.codomain, T.codomain)
            sol3 = solver_for(BTA, budget)
            for k in kinds:
                for n in S23_ORDERS:
                    out = _le(_iv(sol3, k, n), _iv(sol, k, n), hi_scale=nA * nB)
                    tallies["S3"].add(out, _detail("S3", k, n, trial, T=T.entries, A=Am, B=Bm))
        if "S5" in tallies:
            R = T if T.rank() < d else _project_rank(T, rng)
            sol5 = solver_for(R, budget)
            for k in kinds:
                for n in range(R.rank() + 1, d + 1):
                    lo, up = _iv(sol5, k, n)
                    out = PASS if up == 0 else (FAIL if lo > 0 else INDETERMINATE)
                    tallies["S5"].add(out, _detail("S5", k, n, trial, T=R.entries))
        for a in ("S4", "S6"):
            if a in tallies:
                tallies[a].add(UNSUPPORTED)
    return AxiomReport(tuple(kinds), name, trials, seed, tallies)
