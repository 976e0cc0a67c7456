"""Operator matrices, discretisations, norms and the matrix file format."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sncert.numerics.scalar import Mode
from sncert.operators import (OperatorError, OperatorMatrix, VolterraGrid, compose, format_matrix,
                              matrix_norm, op_norm, parse_matrix, read_matrix, summation_matrix,
                              volterra_matrix, write_matrix)
from sncert.spaces import l1, linf, norm_of
from sncert.witnesses import build_factorization_discrete

from conftest import frac_matrix

half = Fraction(1, 2)


def test_summation_matrix_small():
    assert (summation_matrix(3).entries == frac_matrix([[1, 0, 0], [1, 1, 0], [1, 1, 1]])).all()
    assert (summation_matrix(1).entries == frac_matrix([[1]])).all()


def test_volterra_examples():
    assert volterra_matrix(VolterraGrid(3)) == summation_matrix(3)
    mid = volterra_matrix(VolterraGrid(2, "midpoint"))
    assert (mid.entries == frac_matrix([[half, 0], [1, half]])).all()
    pts = volterra_matrix(VolterraGrid(2, "points", (0,)))
    assert (pts.entries == frac_matrix([[0, 0]])).all()


def test_volterra_grid_validation():
    with pytest.raises(OperatorError):
        VolterraGrid(0)
    with pytest.raises(OperatorError):
        VolterraGrid(3, "points", (Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(OperatorError):
        VolterraGrid(3, "simpson")


@pytest.mark.parametrize("N", [1, 2, 7, 30])
def test_volterra_points_scheme_agrees_with_right(N):
    right = volterra_matrix(VolterraGrid(N))
    pts = volterra_matrix(VolterraGrid(N, "points", tuple(Fraction(k, N) for k in range(1, N + 1))))
    assert right == pts


def test_op_norm_examples():
    assert op_norm(summation_matrix(5)).value == 1
    assert op_norm(volterra_matrix(VolterraGrid(4, "midpoint"))).value == 1
    Z = OperatorMatrix.from_rows([[0, 0], [0, 0]])
    assert op_norm(Z).value == 0


@given(st.lists(st.lists(st.integers(-7, 7), min_size=3, max_size=3), min_size=2, max_size=3),
       st.lists(st.integers(1, 4), min_size=3, max_size=3))
def test_op_norm_is_max_over_ball_vertices(rows, w):
    T = OperatorMatrix.from_rows(rows, weights=w)
    best = max(norm_of(T.codomain, T.entries[:, j]) / Fraction(w[j]) for j in range(3))
    assert op_norm(T).value == best
    e = op_norm(T).witness
    assert norm_of(T.domain, e) == 1
    assert norm_of(T.codomain, T.entries @ e) == best


def test_matrix_norm_pairs():
    M = frac_matrix([[1, -2], [3, 4]])
    assert matrix_norm(M, linf(2), linf(2)) == 7
    assert matrix_norm(M, l1(2), linf(2)) == 4
    assert matrix_norm(M, l1(2), l1(2)) == 6
    # linf -> l1: max over sign vectors of |M s|_1
    assert matrix_norm(M, linf(2), l1(2)) == max(abs(1 * a - 2 * b) + abs(3 * a + 4 * b)
                                                 for a in (1, -1) for b in (1, -1))


def test_embedding_block():
    for N in (2, 5, 9):
        big = summation_matrix(N + 1).entries
        assert (big[:N, :N] == summation_matrix(N).entries).all()


def test_factorization_composes_to_identity():
    w = build_factorization_discrete(3, 5)
    P = compose(w.A, summation_matrix(5), w.B)
    assert (P == frac_matrix(np.eye(3, dtype=int).tolist())).all()


def test_matrix_file_round_trip(tmp_path):
    M = frac_matrix([[1, Fraction(-2, 3)], [0, Fraction(5, 7)]])
    p = tmp_path / "m.mat"
    write_matrix(p, M)
    T = read_matrix(p)
    assert T.mode is Mode.EXACT
    assert (T.entries == M).all()
    assert format_matrix(M).splitlines()[0] == "2 2"


def test_matrix_file_mode_detection_and_errors():
    assert parse_matrix("1 2\n0.5 1").dtype == float
    assert parse_matrix("1 2\n1/2 1").dtype == object
    with pytest.raises(OperatorError):
        parse_matrix("2 2\n1 2 3")
    with pytest.raises(OperatorError):
        parse_matrix("x y\n1")
    with pytest.raises(OperatorError):
        parse_matrix("1 1\n1/0")


def test_operator_shape_and_mode_checks():
    with pytest.raises(OperatorError):
        OperatorMatrix(frac_matrix([[1, 2]]), l1(3), linf(1))
    with pytest.raises(OperatorError):
        OperatorMatrix(np.array([[1.0]]), l1(1), linf(1))
    T = summation_matrix(4)
    with pytest.raises(ValueError):
        T.entries[0, 0] = 5


def test_mode_conversion_round_trip():
    T = summation_matrix(6)
    Tf = T.to_mode(Mode.FLOAT)
    assert Tf.mode is Mode.FLOAT
    assert Tf.to_mode(Mode.EXACT) == T
    assert summation_matrix(6, Mode.FLOAT) == Tf


def test_rank():
    assert summation_matrix(7).rank() == 7
    assert OperatorMatrix.from_rows([[1, 2], [2, 4]]).rank() == 1
