"""Inner values for fixed candidates: exact routes, their alternatives and the float forms."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from sncert.numerics import linalg
from sncert.numerics.lp import lp_solve, make_lp
from sncert.numerics.polytope import CapExceeded
from sncert.numerics.scalar import Mode, as_array
from sncert.operators import OperatorMatrix, summation_matrix
from sncert.snumbers import evaluate

from conftest import frac_matrix

small = st.integers(-4, 4)


def int_matrix(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def full_rank(rows, mode=Mode.EXACT):
    M = as_array(rows, mode)
    return linalg.rank(M, mode) == min(M.shape)


# ---------------------------------------------------------------------------
# closed-form examples


def test_sigma2_gelfand_line():
    T = summation_matrix(2)
    # the line spanned by (1, -2) is the kernel of (2, 1)
    assert evaluate.gelfand_value(T, frac_matrix([[2, 1]])) == Fraction(1, 3)


def test_sigma2_kolmogorov_line():
    T = summation_matrix(2)
    val, F = evaluate.kolmogorov_value(T, frac_matrix([[1], [2]]))
    assert val == Fraction(1, 3)
    assert evaluate.approximant_value(T, F) == Fraction(1, 3)
    assert linalg.rank(F) <= 1


def test_identity_quotient_radius():
    I2 = OperatorMatrix.from_rows([[1, 0], [0, 1]])
    assert evaluate.mityagin_value(I2, frac_matrix([[1, 0], [0, 1]])) == Fraction(1, 2)
    assert evaluate.mityagin_zonotope(I2, frac_matrix([[1, 0], [0, 1]])) == Fraction(1, 2)


def test_zero_operator_values():
    Z = OperatorMatrix.from_rows([[0, 0], [0, 0]])
    assert evaluate.mityagin_value(Z, frac_matrix([[1, 0]])) == 0
    assert evaluate.bernstein_value(Z, frac_matrix([[1], [0]])) == 0


def test_block_bernstein_values():
    from sncert.witnesses import block_basis
    assert evaluate.bernstein_value(summation_matrix(3), block_basis(2, 3)) == Fraction(1, 3)
    assert evaluate.bernstein_value(summation_matrix(5), block_basis(3, 5)) == Fraction(1, 5)


def test_rank_deficient_candidates_score_zero():
    T = summation_matrix(3)
    assert evaluate.bernstein_value(T, frac_matrix([[1, 2], [1, 2], [0, 0]])) == 0
    assert evaluate.mityagin_value(T, frac_matrix([[1, 1, 0], [2, 2, 0]])) == 0


# ---------------------------------------------------------------------------
# two exact routes agree


@given(int_matrix(3, 4), int_matrix(1, 4))
def test_gelfand_vertices_equal_dual(T_rows, C_rows):
    assume(any(C_rows[0]))
    T = OperatorMatrix.from_rows(T_rows)
    C = as_array(C_rows, Mode.EXACT)
    assert evaluate.gelfand_value(T, C, use_vertices=True) == \
        evaluate.gelfand_value(T, C, use_vertices=False)


@given(int_matrix(3, 3), int_matrix(3, 2))
def test_bernstein_vertices_equal_chambers(T_rows, B_rows):
    assume(full_rank(B_rows))
    T = OperatorMatrix.from_rows(T_rows)
    B = as_array(B_rows, Mode.EXACT)
    assert evaluate.bernstein_value(T, B) == evaluate.bernstein_chambers(T, B)


@given(int_matrix(3, 3), int_matrix(2, 3))
def test_mityagin_polar_equal_zonotope(T_rows, Q_rows):
    assume(full_rank(Q_rows))
    T = OperatorMatrix.from_rows(T_rows)
    Q = as_array(Q_rows, Mode.EXACT)
    assert evaluate.mityagin_value(T, Q) == evaluate.mityagin_zonotope(T, Q)


# ---------------------------------------------------------------------------
# float forms used inside searches


@given(int_matrix(4, 4), int_matrix(1, 4))
def test_gelfand_float_matches_exact(T_rows, C_rows):
    assume(any(C_rows[0]))
    T = OperatorMatrix.from_rows(T_rows)
    exact = evaluate.gelfand_value(T, as_array(C_rows, Mode.EXACT))
    assert evaluate.gelfand_float(T, np.array(C_rows, dtype=float)) == \
        pytest.approx(float(exact), abs=1e-9)


@given(int_matrix(4, 4), int_matrix(4, 1))
def test_kolmogorov_float_matches_exact(T_rows, W_rows):
    assume(any(r[0] for r in W_rows))
    T = OperatorMatrix.from_rows(T_rows)
    exact, _ = evaluate.kolmogorov_value(T, as_array(W_rows, Mode.EXACT))
    assert evaluate.kolmogorov_float(T, np.array(W_rows, dtype=float)) == \
        pytest.approx(float(exact), abs=1e-9)


@given(int_matrix(4, 4), int_matrix(4, 2))
def test_bernstein_float_matches_exact(T_rows, B_rows):
    assume(full_rank(B_rows))
    T = OperatorMatrix.from_rows(T_rows)
    exact = evaluate.bernstein_value(T, as_array(B_rows, Mode.EXACT))
    assert evaluate.bernstein_float(T, np.array(B_rows, dtype=float)) == \
        pytest.approx(float(exact), abs=1e-9)


@given(int_matrix(4, 4), int_matrix(2, 4))
def test_mityagin_float_matches_exact(T_rows, Q_rows):
    assume(full_rank(Q_rows))
    T = OperatorMatrix.from_rows(T_rows)
    exact = evaluate.mityagin_value(T, as_array(Q_rows, Mode.EXACT))
    assert evaluate.mityagin_float(T, np.array(Q_rows, dtype=float)) == \
        pytest.approx(float(exact), abs=1e-9)


def test_weighted_float_forms():
    T = OperatorMatrix.from_rows([[1, 0, 2], [1, 1, 0]], weights=[2, 1, 3])
    C = frac_matrix([[1, -1, 1]])
    W = frac_matrix([[1], [2]])
    assert evaluate.gelfand_float(T, np.array([[1.0, -1.0, 1.0]])) == \
        pytest.approx(float(evaluate.gelfand_value(T, C)))
    assert evaluate.kolmogorov_float(T, np.array([[1.0], [2.0]])) == \
        pytest.approx(float(evaluate.kolmogorov_value(T, W)[0]))


# ---------------------------------------------------------------------------
# polar vertices against an LP oracle


@given(int_matrix(5, 2), st.tuples(small, small))
def test_polar_vertices_maximise_linear_functionals(P_rows, c):
    assume(full_rank(P_rows) and any(c))
    P = as_array(P_rows, Mode.EXACT)
    V = evaluate.polar_vertices(P, Mode.EXACT, evaluate.EXACT_VERTEX_SOLVES)
    A_ub = P_rows + [[-x for x in r] for r in P_rows]
    res = lp_solve(make_lp(list(c), A_ub=A_ub, b_ub=[1] * len(A_ub), sense="max"))
    assert res.status == "optimal"
    assert max(abs(v[0] * c[0] + v[1] * c[1]) for v in V) == res.optimum
    for v in V:
        assert all(abs(x) <= 1 for x in P @ v)


def test_polar_vertices_unbounded_and_cap():
    assert evaluate.polar_vertices(np.array([[1.0, 1.0], [2.0, 2.0]])) is None
    with pytest.raises(CapExceeded):
        evaluate.polar_vertices(np.eye(12), Mode.FLOAT, max_solves=10)
    assert evaluate.vertex_solves(5, 2) == 20


def test_null_lines_cap():
    with pytest.raises(CapExceeded):
        evaluate.null_lines(np.ones((1, 40)), max_subsets=10)
    assert evaluate.null_lines(np.zeros((0, 3))).shape == (3, 3)
