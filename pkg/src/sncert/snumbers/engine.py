"""Certified intervals for the six strict s-numbers and the cross-kind report."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ..numerics import linalg
from ..numerics.polytope import CapExceeded, PolytopeError
from ..numerics.scalar import COMPARE_TOL, Mode, Scalar, format_scalar, to_mode, zeros
from ..operators import OperatorMatrix, op_norm, summation_matrix
from ..spaces import SECTION_CAP, SpaceError
from ..witnesses import (FactorizationWitness, PigeonholeError, block_basis,
                         build_factorization_discrete, build_factorization_volterra,
                         coordinate_factorization, pigeonhole_lower_gelfand,
                         pigeonhole_lower_kolmogorov, rank_one_approximant, verify_factorization)
from . import evaluate, search
from .types import (KIND_ORDER, Certificate, CertifiedInterval, InconsistencyError, SearchBudget,
                    SNumberKind)

log = logging.getLogger(__name__)

A, C, D, B, M, I = KIND_ORDER
CERTIFY_TOP = 3
EXACT_KOLMOGOROV_COLS = 16


def _is_summation(T: OperatorMatrix) -> bool:
    N = T.shape[1]
    return T.shape == (N, N) and not T.domain.weighted and T == summation_matrix(N, T.mode)


def _via(cert: Certificate, tag: str) -> Certificate:
    return replace(cert, method=f"{cert.method}<{tag}")


def _pick(certs: list[Certificate], lower: bool) -> Certificate:
    """Largest (lower) or smallest (upper) value; ties keep the earliest."""
    best = certs[0]
    for c in certs[1:]:
        if (c.value > best.value) if lower else (c.value < best.value):
            best = c
    return best


@dataclass
class _Found:
    value: Scalar
    data: dict
    method: str


class Solver:
    """Computes and caches every kind's interval for one operator and budget."""

    def __init__(self, T: OperatorMatrix, budget: SearchBudget | None = None):
        self.T = T
        self.mode = T.mode
        self.budget = budget or SearchBudget()
        self.Tf = search.float_operator(T)
        self.norm = op_norm(T).value
        self.rank = T.rank()
        self.sigma = _is_summation(T)
        self.tol = 0 if self.mode is Mode.EXACT else COMPARE_TOL
        self._cache: dict[int, dict[SNumberKind, CertifiedInterval]] = {}
        self.notes: dict[int, dict] = {}

    def zero(self) -> Scalar:
        return to_mode(0, self.mode)

    def interval(self, kind: SNumberKind, n: int) -> CertifiedInterval:
        return self.intervals(n)[kind]

    def intervals(self, n: int) -> dict[SNumberKind, CertifiedInterval]:
        if n < 1:
            raise ValueError("n must be at least 1")
        if n not in self._cache:
            self._cache[n] = self._compute(n)
        return self._cache[n]

    # -- assembly ---------------------------------------------------------

    def _compute(self, n: int) -> dict[SNumberKind, CertifiedInterval]:
        if n == 1:
            cert = Certificate("norm", "norm", self.norm, {}, "op-norm")
            return {k: CertifiedInterval(k, 1, self.norm, self.norm, cert, cert) for k in KIND_ORDER}
        if self.rank < n:
            cert = Certificate(f"rank{self.rank}", "zero", self.zero(), {"rank": self.rank},
                               "rank<n")
            return {k: CertifiedInterval(k, n, self.zero(), self.zero(), cert, cert)
                    for k in KIND_ORDER}
        notes = self.notes.setdefault(n, {})
        L_i = self._isomorphism_lower(n)
        c_pig, d_pig = self._pigeonhole(n)
        imp = self._import(n)
        a_up, pool = self._approximation_upper(n)
        c_up = self._gelfand_upper(n, pool, _max_value([L_i, c_pig]))
        d_up = self._kolmogorov_upper(n, pool, _max_value([L_i, d_pig]))
        b_own, b_heur = self._bernstein_lower(n, L_i, _min_value([c_up, a_up, imp]))
        m_own = self._mityagin_lower(n, L_i, _min_value([a_up, imp]))

        tol = self.tol
        if b_own.value > c_up.value + tol:
            self._fail("bernstein lower exceeds gelfand upper", n, b_own, c_up)
        notes["b_le_c_checked"] = True

        lows, ups = {}, {}
        lows[I] = L_i
        lows[B] = _pick([b_own, _via(L_i, "i")], True)
        lows[M] = _pick([m_own, _via(L_i, "i")], True)
        lows[C] = _pick([c for c in (c_pig, _via(lows[B], "b"), _via(L_i, "i")) if c], True)
        lows[D] = _pick([c for c in (d_pig, _via(L_i, "i")) if c], True)
        lows[A] = _pick([_via(lows[C], "c"), _via(lows[D], "d"), _via(lows[B], "b"),
                         _via(lows[M], "m"), _via(L_i, "i")], True)
        ups[A] = a_up
        ups[C] = _pick([c_up, _via(a_up, "a")], False)
        ups[D] = _pick([d_up, _via(a_up, "a")], False)
        ups[B] = _pick([c for c in (_via(ups[C], "c"), imp) if c], False)
        ups[M] = _pick([c for c in (_via(a_up, "a"), imp) if c], False)
        ups[I] = _pick([c for c in (_via(a_up, "a"), _via(ups[C], "c"), _via(ups[D], "d"),
                                    _via(ups[B], "b"), _via(ups[M], "m"), imp) if c], False)
        out = {k: CertifiedInterval(k, n, self._clamp(lows[k].value, ups[k].value), ups[k].value,
                                    lows[k], ups[k], heuristic=(k is B and b_heur))
               for k in KIND_ORDER}
        self._check(n, out)
        return out

    def _clamp(self, lower: Scalar, upper: Scalar) -> Scalar:
        """Float rounding can leave a lower a few ulps above its upper; meet at the upper."""
        if self.mode is Mode.FLOAT and upper < lower <= upper + self.tol:
            return upper
        return lower

    def _check(self, n: int, iv: dict[SNumberKind, CertifiedInterval]) -> None:
        tol = self.tol
        for k, v in iv.items():
            if v.lower > v.upper + tol:
                self._fail(f"{k.value} lower exceeds its upper", n, v.lower_cert, v.upper_cert)
        for k in KIND_ORDER:
            if iv[I].lower > iv[k].upper + tol:
                self._fail(f"isomorphism lower exceeds {k.value} upper", n,
                           iv[I].lower_cert, iv[k].upper_cert)
        pairs = [(B, C), (C, A), (D, A), (B, A), (M, A)]
        for lo, hi in pairs:
            if iv[lo].lower > iv[hi].upper + tol:
                self._fail(f"{lo.value} lower exceeds {hi.value} upper", n,
                           iv[lo].lower_cert, iv[hi].upper_cert)
        if iv[M].lower < iv[I].lower:
            self._fail("mityagin lower below isomorphism lower", n,
                       iv[M].lower_cert, iv[I].lower_cert)

    def _fail(self, message: str, n: int, *certs: Certificate) -> None:
        dump = {"message": message, "n": n, "mode": self.mode.value,
                "matrix": [[format_scalar(x) for x in row] for row in self.T.entries],
                "weights": [format_scalar(x) for x in self.T.domain.weights],
                "budget": vars(self.budget) if hasattr(self.budget, "__dict__") else {},
                "certificates": [{"id": c.wid, "source": c.source, "method": c.method,
                                  "value": format_scalar(c.value)} for c in certs]}
        raise InconsistencyError(message, dump)

    # -- sup-type kinds ---------------------------------------------------

    def _isomorphism_lower(self, n: int) -> Certificate:
        T, mode, budget = self.T, self.mode, self.budget
        found: list[tuple[Scalar, FactorizationWitness, str]] = []
        N = T.shape[1]
        if self.sigma and N >= 2 * n - 1:
            w = build_factorization_discrete(n, N, mode)
            chk = verify_factorization(w, T)
            if chk.ok:
                found.append((chk.bound, w, "block-discrete"))
            if N % (2 * n - 1) == 0:
                w = build_factorization_volterra(n, N, mode)
                chk = verify_factorization(w, T)
                if chk.ok:
                    found.append((chk.bound, w, "block-volterra"))
        for rows, cols in self._coordinate_pairs(n)[:CERTIFY_TOP]:
            w = coordinate_factorization(T, list(rows), list(cols))
            if w is None:
                continue
            chk = verify_factorization(w, T)
            if chk.ok:
                found.append((chk.bound, w, "coordinate"))
        if not found:
            log.info("no factorization witness found for n=%d", n)
            return Certificate(f"i{n}-lo-0", "zero", self.zero(), {}, "none")
        best = found[0]
        for f in found[1:]:
            if f[0] > best[0]:
                best = f
        value, w, method = best
        return Certificate(f"i{n}-lo-fact", "factorization", value,
                           {"A": w.A, "B": w.B, "E": w.E_space, "witness": w}, method)

    def _coordinate_pairs(self, n: int) -> list[tuple[tuple, tuple]]:
        """Row/column index sets ranked by the float bound ``1/|T_SJ^{-1}|``."""
        if "coord_pairs" in self.notes.get(n, {}):
            return self.notes[n]["coord_pairs"]
        Tf = self.Tf.entries
        m, N = Tf.shape
        budget = self.budget
        rng = search.rng_for(budget.seed, 6, n)
        lim = budget.exhaustive_limit
        if math.comb(m, n) * math.comb(N, n) <= lim:
            rsets = search.subsets(m, n, lim, rng)
            csets = search.subsets(N, n, lim, rng)
        else:
            side = max(4, int(math.isqrt(lim)))
            rsets = search.subsets(m, n, side, rng, search.preferred_subsets(m, n))
            csets = search.subsets(N, n, side, rng, search.preferred_subsets(N, n))
        w = np.array([float(x) for x in self.T.domain.weights])
        signs = np.array(list(_sign_vectors(n)), dtype=float).T  # n x 2^(n-1)
        scored = []
        for r in rsets:
            sub = Tf[np.ix_(r, range(N))]
            for c in csets:
                S = sub[:, c]
                if abs(np.linalg.det(S)) < 1e-10:
                    continue
                inv = np.linalg.inv(S)
                nb = (w[list(c)][:, None] * np.abs(inv @ signs)).sum(axis=0).max()
                scored.append((-1.0 / nb, r, c))
        scored.sort()
        pairs = [(r, c) for _, r, c in scored]
        self.notes.setdefault(n, {})["coord_pairs"] = pairs
        return pairs

    def _bernstein_lower(self, n: int, L_i: Certificate, target: Scalar
                         ) -> tuple[Certificate, bool]:
        T, mode, budget = self.T, self.mode, self.budget
        N = T.shape[1]
        if evaluate.vertex_solves(T.shape[0], n) > evaluate.vertex_cap(mode):
            rng = search.rng_for(budget.seed, 3, n)
            est = None
            if N >= 2 * n - 1:
                est = evaluate.bernstein_sampled(T, block_basis(n, N, Mode.FLOAT), rng)
            self.notes[n]["bernstein_sampled"] = est
            return Certificate(f"b{n}-lo-0", "zero", self.zero(), {"sampled": est},
                               "sampled", heuristic=True), True
        structured = []
        if N >= 2 * n - 1:
            Bx = block_basis(n, N, mode)
            structured.append((block_basis(n, N, Mode.FLOAT), Bx, "block"))
        rng = search.rng_for(budget.seed, 3, n)
        for J in search.subsets(N, n, budget.exhaustive_limit, rng, search.preferred_subsets(N, n)):
            E = search.coordinate_rows(J, N).T
            structured.append((E, _exact(E, mode), "coordinate"))
        if L_i.source == "factorization":
            Bw = L_i.data["B"]
            structured.append((_float(Bw), Bw, "factorization-range"))
        found = self._run_search("b", n, structured, (N, n), self._certify_b, target)
        if found is None:
            return Certificate(f"b{n}-lo-0", "zero", self.zero(), {}, "none"), False
        return Certificate(f"b{n}-lo-sub", "bernstein_subspace", found.value, found.data,
                           found.method), False

    def _certify_b(self, x) -> _Found:
        return _Found(evaluate.bernstein_value(self.T, x), {"basis": x}, "")

    def _mityagin_lower(self, n: int, L_i: Certificate, target: Scalar) -> Certificate:
        T, mode, budget = self.T, self.mode, self.budget
        m = T.shape[0]
        if evaluate.vertex_solves(T.shape[1], n) > evaluate.vertex_cap(mode):
            return Certificate(f"m{n}-lo-0", "zero", self.zero(), {}, "vertex-cap")
        rng = search.rng_for(budget.seed, 4, n)
        structured = []
        for S in search.subsets(m, n, budget.exhaustive_limit, rng, search.preferred_subsets(m, n)):
            Q = search.coordinate_rows(S, m)
            structured.append((Q, _exact(Q, mode), "coordinate"))
        if L_i.source == "factorization":
            Aw = L_i.data["A"]
            structured.append((_float(Aw), Aw, "factorization-quotient"))
        found = self._run_search("m", n, structured, (n, m), self._certify_m, target)
        if found is None:
            return Certificate(f"m{n}-lo-0", "zero", self.zero(), {}, "none")
        return Certificate(f"m{n}-lo-quot", "mityagin_quotient", found.value, found.data,
                           found.method)

    def _certify_m(self, x) -> _Found:
        return _Found(evaluate.mityagin_value(self.T, x), {"Q": x}, "")

    # -- inf-type kinds ---------------------------------------------------

    def _approximation_upper(self, n: int) -> tuple[Certificate, list]:
        """Best ``|T - F|`` over rank ``< n`` candidates, plus the float factor pool."""
        T, mode, budget = self.T, self.mode, self.budget
        Tf = self.Tf.entries
        m, N = Tf.shape
        r = n - 1
        exact: list[_Found] = [_Found(self.norm, {"F": zeros(T.shape, mode), "rank_bound": 0},
                                      "zero")]
        if not T.domain.weighted:
            rw = rank_one_approximant(T)
            exact.append(_Found(rw.deviation, {"F": rw.F, "rank_bound": 1}, "rank-one"))
        if m == N == n:
            gk = _gastinel_kahan(T)
            if gk is not None:
                exact.append(gk)
        # float factor seeds (U: m x r, V: r x N)
        seeds = []
        U0, s0, Vt0 = np.linalg.svd(Tf)
        seeds.append((U0[:, :r] * s0[:r], Vt0[:r].copy(), "svd"))
        ones = np.concatenate([np.full((m, 1), 0.5), U0[:, :r - 1] * s0[:r - 1]], axis=1)
        seeds.append((ones, np.concatenate([np.ones((1, N)), Vt0[:r - 1]]), "rank-one"))
        rng = search.rng_for(budget.seed, 0, n)
        for _ in range(max(1, budget.candidates // 2)):
            seeds.append((rng.standard_normal((m, r)), rng.standard_normal((r, N)), "random"))
        pool = []
        for U, V, tag in seeds:
            pool += self._alternate(U, tag)
        pool.sort(key=lambda p: (p[0], p[3]))
        self.notes[n]["a_pool"] = pool
        for val, U, V, tag in pool[:CERTIFY_TOP]:
            for Ux, Vx in zip(search.snapped_variants(U, mode), search.snapped_variants(V, mode)):
                F = Ux @ Vx
                exact.append(_Found(evaluate.approximant_value(T, F), {"F": F, "rank_bound": r},
                                    tag))
        best = exact[0]
        for f in exact[1:]:
            if f.value < best.value:
                best = f
        return Certificate(f"a{n}-up-F", "approximant", best.value, best.data, best.method), pool

    def _alternate(self, U: np.ndarray, tag: str) -> list:
        """Alternating Chebyshev fits: best columns for a range, then best rows for a kernel."""
        Tf = self.Tf
        out = []
        for _ in range(self.budget.alternations):
            try:
                val, F = evaluate.kolmogorov_value(Tf, U)
                W = evaluate.independent_cols(U, Mode.FLOAT)
                Z = np.linalg.lstsq(W, F, rcond=None)[0] if W.shape[1] else np.zeros((0, F.shape[1]))
                out.append((float(val), W, Z, f"{tag}+alt"))
                C = evaluate.independent_rows(Z, Mode.FLOAT)
                if C.shape[0] == 0:
                    break
                val, F = evaluate.gelfand_dual(Tf, C)
                Un = np.linalg.lstsq(C.T, F.T, rcond=None)[0].T
                out.append((float(val), Un, C, f"{tag}+alt"))
                U = Un
            except (SpaceError, np.linalg.LinAlgError) as exc:
                log.debug("alternation stopped: %s", exc)
                break
        return out

    def _gelfand_upper(self, n: int, pool: list, target: Scalar) -> Certificate:
        T, mode, budget = self.T, self.mode, self.budget
        m, N = T.shape
        r = n - 1
        rng = search.rng_for(budget.seed, 1, n)
        structured = []
        for S in search.subsets(N, r, budget.exhaustive_limit, rng, search.preferred_subsets(N, r)):
            Cm = search.coordinate_rows(S, N)
            structured.append((Cm, _exact(Cm, mode), "coordinate"))
        diff = np.zeros((r, N))
        for k in range(r):
            if 2 * k + 1 < N:
                diff[k, 2 * k], diff[k, 2 * k + 1] = 1.0, -1.0
        structured.append((diff, _exact(diff, mode), "differences"))
        for val, U, V, tag in pool[:CERTIFY_TOP]:
            structured.append((V, None, "from-approximant"))
        found = self._run_search("c", n, structured, (r, N), self._certify_c, target)
        return Certificate(f"c{n}-up-sub", found.data.pop("source", "gelfand_subspace"),
                           found.value, found.data, found.method)

    def _certify_c(self, x) -> _Found:
        T = self.T
        if self.mode is Mode.FLOAT or T.shape[1] <= SECTION_CAP:
            return _Found(evaluate.gelfand_value(T, x), {"constraints": x}, "")
        # large exact instance: certify through an approximant vanishing on ker x
        _, Ff = evaluate.gelfand_dual(self.Tf, _float(x))
        Cf = evaluate.independent_rows(_float(x), Mode.FLOAT)
        U = np.linalg.lstsq(Cf.T, Ff.T, rcond=None)[0].T
        best = None
        for Ux in search.snapped_variants(U, self.mode):
            F = Ux @ evaluate.independent_rows(x, self.mode)
            v = evaluate.approximant_value(T, F)
            if best is None or v < best.value:
                best = _Found(v, {"constraints": x, "F": F, "source": "approximant"}, "")
        return best

    def _kolmogorov_upper(self, n: int, pool: list, target: Scalar) -> Certificate:
        T, mode, budget = self.T, self.mode, self.budget
        m, N = T.shape
        r = n - 1
        rng = search.rng_for(budget.seed, 2, n)
        structured = []
        for S in search.subsets(m, r, budget.exhaustive_limit, rng, search.preferred_subsets(m, r)):
            Wm = search.coordinate_rows(S, m).T
            structured.append((Wm, _exact(Wm, mode), "coordinate"))
        for J in search.subsets(N, r, max(1, budget.exhaustive_limit // 4), rng,
                                search.preferred_subsets(N, r)):
            Wm = self.Tf.entries[:, list(J)]
            structured.append((Wm, T.entries[:, list(J)], "columns"))
        for val, U, V, tag in pool[:CERTIFY_TOP]:
            structured.append((U, None, "from-approximant"))
        found = self._run_search("d", n, structured, (m, r), self._certify_d, target)
        return Certificate(f"d{n}-up-sub", found.data.pop("source", "kolmogorov_subspace"),
                           found.value, found.data, found.method)

    def _certify_d(self, x) -> _Found:
        T = self.T
        if self.mode is Mode.FLOAT or T.shape[1] <= EXACT_KOLMOGOROV_COLS:
            return _Found(evaluate.kolmogorov_value(T, x)[0], {"basis": x}, "")
        _, Ff = evaluate.kolmogorov_value(self.Tf, _float(x))
        W = evaluate.independent_cols(x, self.mode)
        Z = np.linalg.lstsq(_float(W), Ff, rcond=None)[0]
        best = None
        for Zx in search.snapped_variants(Z, self.mode):
            F = W @ Zx
            v = evaluate.approximant_value(T, F)
            if best is None or v < best.value:
                best = _Found(v, {"basis": x, "F": F, "source": "approximant"}, "")
        return best

    # -- shared search driver ---------------------------------------------

    def _run_search(self, kind: str, n: int, structured: list, random_shape, certify,
                    target: Scalar | None = None) -> _Found | None:
        """Screen, refine and certify candidates of one kind.

        ``structured`` holds ``(float candidate, exact candidate or None, tag)``;
        random candidates of ``random_shape`` are appended. The best few are
        re-evaluated in the operator's mode by ``certify``. Refinement is
        skipped once a certified value reaches ``target``, a bound from the
        other side that no candidate can beat.
        """
        budget = self.budget
        sup = kind in ("b", "m")
        rng = search.rng_for(budget.seed, "abcdmi".index(kind) + 10, n)
        cands = list(structured)
        if random_shape is not None:
            cands += [(search.random_matrix(rng, random_shape), None, "random")
                      for _ in range(budget.candidates)]
        if not cands:
            return None
        vals = search.evaluate_all(kind, self.Tf, [c[0] for c in cands], budget.workers)
        order = sorted(range(len(cands)), key=lambda i: (vals[i], i))
        order = [i for i in order if vals[i] < search.BAD]
        top = order[:max(1, budget.candidates)]
        pool = [(vals[i], i, cands[i]) for i in top]
        best = self._certify_pool(pool, certify, sup)
        if self._reached(best, target, sup):
            return best
        if budget.refine_rounds and random_shape is not None:
            starts = [cands[i][0] for i in top
                      if np.size(cands[i][0]) <= budget.refine_params]
            refined = search.refine_all(kind, self.Tf, starts, budget.refine_rounds, budget.workers)
            pool = [(v, len(cands) + j, (x, None, "refined")) for j, (v, x) in enumerate(refined)]
            best = self._better(best, self._certify_pool(pool, certify, sup), sup)
        return best

    def _reached(self, best: _Found | None, target: Scalar | None, sup: bool) -> bool:
        if best is None or target is None:
            return False
        return best.value >= target - self.tol if sup else best.value <= target + self.tol

    @staticmethod
    def _better(a: _Found | None, b: _Found | None, sup: bool) -> _Found | None:
        if a is None or b is None:
            return a if b is None else b
        return b if ((b.value > a.value) if sup else (b.value < a.value)) else a

    def _certify_pool(self, pool: list, certify, sup: bool) -> _Found | None:
        pool = sorted(pool, key=lambda p: (p[0], p[1]))
        best = None
        for _, _, (xf, xe, tag) in pool[:CERTIFY_TOP]:
            variants = [xe] if xe is not None else search.snapped_variants(xf, self.mode)
            for x in variants:
                try:
                    f = certify(x)
                except (SpaceError, PolytopeError, ZeroDivisionError) as exc:
                    log.debug("certification of %s candidate failed: %s", tag, exc)
                    continue
                f.method = tag
                best = self._better(best, f, sup)
        return best

    # -- certificates from elsewhere --------------------------------------

    def _pigeonhole(self, n: int):
        out = []
        for kind, fn in (("c", pigeonhole_lower_gelfand), ("d", pigeonhole_lower_kolmogorov)):
            try:
                bound, tr = fn(self.T, n)
            except PigeonholeError as exc:
                log.debug("pigeonhole %s certificate unavailable: %s", kind, exc)
                out.append(None)
                continue
            out.append(Certificate(f"{kind}{n}-lo-pig", "pigeonhole", bound, {"transcript": tr},
                                   "pigeonhole"))
        return out

    def _import(self, n: int) -> Certificate | None:
        """``s_n(sigma_N) <= s_n(sigma)`` by the ideal property, with the known limit values."""
        if not self.sigma:
            return None
        v = to_mode(Fraction(1, 2 * n - 1), self.mode)
        return Certificate(f"s{n}-up-import", "import", v, {"N": self.T.shape[1]},
                           "ideal+limit")


def _max_value(certs) -> Scalar | None:
    vals = [c.value for c in certs if c is not None]
    return max(vals) if vals else None


def _min_value(certs) -> Scalar | None:
    vals = [c.value for c in certs if c is not None]
    return min(vals) if vals else None


def _sign_vectors(n: int):
    import itertools
    for s in itertools.product((1, -1), repeat=n - 1):
        yield (1,) + s


def _exact(x: np.ndarray, mode: Mode) -> np.ndarray:
    from ..numerics.scalar import convert
    if mode is Mode.FLOAT:
        return np.asarray(x, dtype=float)
    return convert(np.asarray(x, dtype=float), Mode.EXACT)


def _float(x: np.ndarray) -> np.ndarray:
    from ..numerics.scalar import convert
    return convert(x, Mode.FLOAT)


def _gastinel_kahan(T: OperatorMatrix) -> _Found | None:
    """Square ``T``: a rank-one ``E`` with ``T - E`` singular and ``|E| = 1/|T^{-1}|``."""
    mode = T.mode
    inv = linalg.inverse(T.entries, mode)
    if inv is None:
        return None
    n = T.shape[0]
    w = T.domain.weights
    best = None
    for s in _sign_vectors(n):
        sv = np.array([to_mode(x, mode) for x in s], dtype=T.entries.dtype)
        x = inv @ sv
        nx = sum((wi * abs(xi) for wi, xi in zip(w, x)), to_mode(0, mode))
        if best is None or nx > best[0]:
            best = (nx, sv, x)
    nx, sv, x = best
    sg = np.array([to_mode(int(xi > 0) - int(xi < 0), mode) for xi in x], dtype=T.entries.dtype)
    E = np.outer(sv, w * sg) / nx
    F = T.entries - E
    return _Found(evaluate.approximant_value(T, F), {"F": F, "rank_bound": n - 1},
                  "gastinel-kahan")


# ---------------------------------------------------------------------------
# public engine functions

_SOLVERS: dict = {}


def solver_for(T: OperatorMatrix, budget: SearchBudget | None = None) -> Solver:
    budget = budget or SearchBudget()
    if T.mode is Mode.EXACT:
        X, d = T.scaled()
        key = ("x", X.shape, X.tobytes() if X.dtype != object else tuple(X.flat), d)
    else:
        key = ("f", T.entries.shape, T.entries.tobytes())
    key = key + (tuple(T.domain.weights.tolist()), budget)
    s = _SOLVERS.get(key)
    if s is None:
        if len(_SOLVERS) > 64:
            _SOLVERS.clear()
        s = _SOLVERS[key] = Solver(T, budget)
    return s


def approximation_number(T, n, budget=None) -> CertifiedInterval:
    return solver_for(T, budget).interval(A, n)


def gelfand_number(T, n, budget=None) -> CertifiedInterval:
    return solver_for(T, budget).interval(C, n)


def kolmogorov_number(T, n, budget=None) -> CertifiedInterval:
    return solver_for(T, budget).interval(D, n)


def bernstein_number(T, n, budget=None) -> CertifiedInterval:
    return solver_for(T, budget).interval(B, n)


def mityagin_number(T, n, budget=None) -> CertifiedInterval:
    return solver_for(T, budget).interval(M, n)


def isomorphism_number(T, n, budget=None) -> CertifiedInterval:
    return solver_for(T, budget).interval(I, n)


@dataclass
class Report:
    n_max: int
    intervals: list[CertifiedInterval] = field(default_factory=list)

    def get(self, kind: SNumberKind, n: int) -> CertifiedInterval:
        for iv in self.intervals:
            if iv.kind is kind and iv.n == n:
                return iv
        raise KeyError((kind, n))

    def rows(self) -> list[dict]:
        return [iv.row() for iv in self.intervals]


def report(T: OperatorMatrix, n_max: int, budget: SearchBudget | None = None,
           kinds=KIND_ORDER, n_min: int = 1) -> Report:
    """All requested kinds for ``n = n_min .. n_max``, ordered by (kind, n).

    Raises :class:`InconsistencyError` when certified bounds contradict one of
    the proven inequalities between kinds.
    """
    s = solver_for(T, budget)
    rep = Report(n_max)
    for k in kinds:
        for n in range(n_min, n_max + 1):
            rep.intervals.append(s.interval(k, n))
    return rep
