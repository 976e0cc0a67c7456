"""Scalars, exact linear algebra, the simplex solver and polytope routines."""
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sncert.numerics import _simplex_py, linalg
from sncert.numerics import lp as lpmod
from sncert.numerics.lp import LPError, certificate_gap, lp_solve, make_lp
from sncert.numerics.polytope import (DegenerateError, VPolytope, Zonotope, brute_force_zonotope_points,
                                      contains, gauge, hull_facets, zonotope_vertices)
from sncert.numerics.scalar import (MixedModeError, Mode, as_array, convert, format_scalar,
                                    from_scaled, mode_of, parse_scalar, safe_matmul, scaled_int,
                                    to_mode)

from conftest import frac_matrix

small_int = st.integers(-6, 6)
small_frac = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 6))


# ---------------------------------------------------------------------------
# scalars


def test_parse_and_format_round_trip():
    assert parse_scalar("3/6") == Fraction(1, 2)
    assert parse_scalar("0.1") == Fraction(1, 10)
    assert parse_scalar("1/4", Mode.FLOAT) == 0.25
    assert format_scalar(Fraction(-2, 4)) == "-1/2"
    assert format_scalar(Fraction(3)) == "3"
    assert format_scalar(0.1) == "0.1"


def test_float_refused_in_exact_mode():
    with pytest.raises(MixedModeError):
        to_mode(0.5, Mode.EXACT)
    with pytest.raises(MixedModeError):
        mode_of(np.array([Fraction(1), 0.5], dtype=object))


@given(st.lists(st.lists(small_frac, min_size=3, max_size=3), min_size=1, max_size=4))
def test_scaled_int_round_trip(rows):
    M = frac_matrix(rows)
    X, d = scaled_int(M)
    assert np.issubdtype(X.dtype, np.integer) or X.dtype == object
    assert (from_scaled(X, d) == M).all()


def test_safe_matmul_promotes_on_overflow():
    big = np.array([[2 ** 40, 2 ** 40]], dtype=np.int64)
    out = safe_matmul(big, big.T)
    assert int(out[0, 0]) == 2 * 2 ** 80


def test_convert_float_is_exact_dyadic():
    x = convert(np.array([0.1]), Mode.EXACT)[0]
    assert x == Fraction(0.1)
    assert convert(as_array([Fraction(1, 3)], Mode.EXACT), Mode.FLOAT)[0] == pytest.approx(1 / 3)


# ---------------------------------------------------------------------------
# exact linear algebra


def test_rank_nullspace_inverse_exact():
    M = frac_matrix([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert linalg.rank(M) == 2
    K = linalg.nullspace(M)
    assert K.shape == (3, 1)
    assert all(v == 0 for v in (M @ K).flat)
    assert linalg.inverse(M) is None
    A = frac_matrix([[2, 1], [1, 1]])
    assert (A @ linalg.inverse(A) == frac_matrix([[1, 0], [0, 1]])).all()


@given(st.lists(st.lists(small_int, min_size=3, max_size=3), min_size=3, max_size=3))
def test_exact_rank_matches_float_rank(rows):
    M = frac_matrix(rows)
    assert linalg.rank(M) == np.linalg.matrix_rank(np.array(rows, dtype=float))


# ---------------------------------------------------------------------------
# linear programming


def test_lp_one_constraint():
    res = lp_solve(make_lp([1], A_ub=[[-1]], b_ub=[-3]))
    assert res.status == "optimal"
    assert res.optimum == 3 and res.x[0] == 3


def test_lp_infeasible():
    res = lp_solve(make_lp([0], A_ub=[[1], [-1]], b_ub=[-1, -1]))
    assert res.status == "infeasible"


def test_lp_unbounded():
    res = lp_solve(make_lp([-1], A_ub=[[-1]], b_ub=[0]))
    assert res.status == "unbounded"


def test_lp_two_lines_intersection():
    # variables (t, u): min t with t >= 1 - u and t >= 2u - 1
    lp = make_lp([1, 0], A_ub=[[-1, -1], [-1, 2]], b_ub=[-1, 1])
    res = lp_solve(lp)
    assert res.optimum == Fraction(1, 3)
    assert res.x[1] == Fraction(2, 3)
    gap = certificate_gap(lp, res)
    assert gap["primal_feasible"] and gap["dual_feasible"] and gap["gap_closed"]
    assert gap["dual"] == Fraction(1, 3)


def test_lp_rejects_bad_shapes():
    with pytest.raises(LPError):
        make_lp([1, 2], A_ub=[[1]], b_ub=[1])
    with pytest.raises(LPError):
        make_lp([1], sense="sideways")


@st.composite
def bounded_lps(draw):
    n = draw(st.integers(1, 3))
    m = draw(st.integers(1, 4))
    A = [[draw(small_int) for _ in range(n)] for _ in range(m)]
    b = [draw(st.integers(0, 6)) for _ in range(m)]
    c = [draw(small_int) for _ in range(n)]
    # box rows keep every instance bounded and feasible at 0
    A += [[int(i == j) for j in range(n)] for i in range(n)]
    A += [[-int(i == j) for j in range(n)] for i in range(n)]
    b += [5] * (2 * n)
    return c, A, b


@given(bounded_lps(), st.sampled_from(["min", "max"]))
def test_lp_duality_certificate_exact(data, sense):
    c, A, b = data
    lp = make_lp(c, A_ub=A, b_ub=b, sense=sense)
    res = lp_solve(lp)
    assert res.status == "optimal"
    gap = certificate_gap(lp, res)
    assert gap["primal_feasible"] and gap["dual_feasible"] and gap["gap_closed"]


@given(bounded_lps())
def test_lp_float_matches_exact(data):
    c, A, b = data
    ex = lp_solve(make_lp(c, A_ub=A, b_ub=b))
    fl = lp_solve(make_lp(c, A_ub=A, b_ub=b, mode=Mode.FLOAT))
    assert fl.optimum == pytest.approx(float(ex.optimum), abs=1e-9)


@given(bounded_lps())
def test_lp_optimum_beats_vertex_enumeration(data):
    """Brute force over every basic solution of the box-constrained program."""
    c, A, b = data
    n = len(c)
    best = None
    Af, bf = np.array(A, dtype=float), np.array(b, dtype=float)
    for rows in itertools.combinations(range(len(A)), n):
        M = Af[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, bf[list(rows)])
        if (Af @ x <= bf + 1e-9).all():
            v = float(np.dot(c, x))
            best = v if best is None else min(best, v)
    res = lp_solve(make_lp(c, A_ub=A, b_ub=b))
    assert float(res.optimum) == pytest.approx(best, abs=1e-9)


# ---------------------------------------------------------------------------
# compiled kernel against the reference loop


@st.composite
def tableaux(draw):
    m = draw(st.integers(1, 5))
    k = draw(st.integers(1, 6))
    A = np.array([[draw(st.integers(-4, 4)) for _ in range(k)] for _ in range(m)], dtype=float)
    b = np.array([draw(st.integers(0, 6)) for _ in range(m)], dtype=float)
    c = np.array([draw(st.integers(-5, 5)) for _ in range(k)], dtype=float)
    T = np.ascontiguousarray(np.concatenate([A, np.eye(m), b[:, None]], axis=1))
    obj = np.ascontiguousarray(np.concatenate([c, np.zeros(m + 1)]))
    basis = np.arange(k, k + m, dtype=np.int64)
    return T, obj, basis, k + m


@pytest.mark.skipif(lpmod._simplex_ext is None, reason="compiled kernel not built")
@given(tableaux())
def test_compiled_kernel_matches_python(tab):
    T, obj, basis, n_allowed = tab
    T1, o1, b1 = T.copy(), obj.copy(), basis.copy()
    T2, o2, b2 = T.copy(), obj.copy(), basis.copy()
    r1 = _simplex_py.simplex_core(T1, o1, b1, n_allowed, 1e-12, 1000)
    r2 = lpmod._simplex_ext.simplex_core(T2, o2, b2, n_allowed, 1e-12, 1000)
    assert tuple(r1) == tuple(r2)
    assert (b1 == b2).all()
    np.testing.assert_allclose(T1, T2, atol=1e-9)
    np.testing.assert_allclose(o1, o2, atol=1e-9)


def test_backend_flag():
    assert lpmod.BACKEND in ("compiled", "python")
    assert (lpmod.BACKEND == "compiled") == (lpmod._simplex_ext is not None)


# ---------------------------------------------------------------------------
# polytopes


def cross_polytope(mode=Mode.EXACT):
    return VPolytope.symmetric_hull(as_array([[1, 0], [0, 1]], mode))


def test_gauge_examples():
    body = cross_polytope()
    assert gauge(as_array([1, 0], Mode.EXACT), body) == 1
    assert gauge(as_array([0, 0], Mode.EXACT), body) == 0
    assert gauge(as_array([1, 1], Mode.EXACT), body) == 2


def test_gauge_matches_scaling_search():
    body = cross_polytope(Mode.FLOAT)
    p = np.array([1.0, 1.0])
    ts = np.linspace(0.01, 4, 400)
    first = next(t for t in ts if contains(p / t, body))
    assert gauge(p, body) == pytest.approx(first, abs=0.01)


def test_zonotope_examples():
    def verts(rows):
        V, _ = zonotope_vertices(Zonotope(as_array(rows, Mode.EXACT)))
        return {tuple(v) for v in V}
    assert verts([[1, 0], [0, 1]]) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert verts([[1, 0]]) == {(1, 0), (-1, 0)}
    assert verts([[1, 0], [1, 1]]) == {(2, 1), (0, -1), (-2, -1), (0, 1)}


@given(st.lists(st.tuples(small_int, small_int), min_size=1, max_size=5))
def test_zonotope_vertices_are_extreme_sign_points(gens):
    Z = Zonotope(as_array([list(g) for g in gens], Mode.EXACT))
    V, signs = zonotope_vertices(Z)
    pts = brute_force_zonotope_points(Z)
    keys = {tuple(p) for p in pts}
    assert all(tuple(v) in keys for v in V)
    # every brute-force point lies in the hull of the reported vertices
    body = VPolytope(V)
    for p in pts:
        assert contains(p, body)


def test_hull_facets_cross_polytope():
    A, b = hull_facets(as_array([[1, 0], [-1, 0], [0, 1], [0, -1]], Mode.EXACT))
    assert len(A) == 4
    assert all(x == 1 for x in b)
    assert {tuple(abs(v) for v in row) for row in A} == {(1, 1)}


def test_hull_facets_collinear_is_degenerate():
    with pytest.raises(DegenerateError):
        hull_facets(as_array([[0, 0], [1, 1], [2, 2]], Mode.EXACT))
