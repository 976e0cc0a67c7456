"""Factorizations, approximants, block subspaces, trial families and pigeonhole certificates."""
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sncert.numerics.scalar import Mode, as_array
from sncert.operators import OperatorMatrix, VolterraGrid, summation_matrix, volterra_matrix
from sncert.snumbers import evaluate
from sncert.spaces import l1, linf_distance, norm_of
from sncert.witnesses import (PigeonholeError, WitnessError, block_basis, build_factorization_discrete,
                              build_factorization_volterra, coordinate_factorization,
                              export_witnesses, parse_witness_file, pigeonhole_lower_gelfand,
                              pigeonhole_lower_kolmogorov, rank_one_approximant, record_to_witness,
                              replay_transcript, to_record, trial_family, verify_approximant,
                              verify_factorization, verify_record)

from conftest import frac_matrix

half = Fraction(1, 2)


def sigma(N, mode=Mode.EXACT):
    return summation_matrix(N, mode)


def right_volterra(N):
    return volterra_matrix(VolterraGrid(N))


# ---------------------------------------------------------------------------
# factorizations


@pytest.mark.parametrize("n,N,bound", [(3, 5, Fraction(1, 5)), (1, 1, 1), (2, 10, Fraction(1, 3))])
def test_discrete_factorization(n, N, bound):
    w = build_factorization_discrete(n, N)
    chk = verify_factorization(w, sigma(N))
    assert chk.ok
    assert chk.bound == bound == w.implied_bound
    assert chk.normA == 1 and chk.normB == 2 * n - 1


@pytest.mark.parametrize("n,N,bound", [(2, 3, Fraction(1, 3)), (1, 1, 1), (3, 15, Fraction(1, 5))])
def test_volterra_factorization(n, N, bound):
    w = build_factorization_volterra(n, N)
    chk = verify_factorization(w, right_volterra(N))
    assert chk.ok and chk.bound == bound
    assert chk.normA == (2 * n - 1) ** 2
    assert chk.normB == Fraction(1, 2 * n - 1)
    assert list(w.E_space.weights) == [2] * (n - 1) + [1]


def test_factorization_rejects_short_grids():
    with pytest.raises(WitnessError):
        build_factorization_discrete(3, 4)
    with pytest.raises(WitnessError):
        build_factorization_volterra(2, 4)


def test_tampered_factorization_fails():
    w = build_factorization_discrete(3, 5)
    B = w.B.copy()
    B[0, 0] += 1
    chk = verify_factorization(replace(w, B=B), sigma(5))
    assert not chk.ok
    assert chk.offending is not None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_factorization_bound(n):
    """``Id: l1_n -> linf_n`` with ``A = B = Id`` through ``E = linf_n``: bound ``1/n``.

    The value 1 holds only for n = 1 in this norm pair: the constant ``1/2``
    matrix is within ``1/2`` of ``Id_2``, so nothing above ``1/2`` is possible at n = 2.
    """
    In = OperatorMatrix.from_rows(np.eye(n, dtype=int).tolist())
    w = coordinate_factorization(In, list(range(n)), list(range(n)))
    chk = verify_factorization(w, In)
    assert chk.ok and chk.bound == Fraction(1, n)


def test_factorization_float_mode():
    w = build_factorization_discrete(2, 3, Mode.FLOAT)
    chk = verify_factorization(w, sigma(3, Mode.FLOAT))
    assert chk.ok and chk.bound == pytest.approx(1 / 3)


# ---------------------------------------------------------------------------
# approximants


@pytest.mark.parametrize("N", [1, 2, 3, 8, 31])
def test_rank_one_deviation_is_half(N):
    w = rank_one_approximant(sigma(N))
    assert w.deviation == half
    ok, dev = verify_approximant(w, sigma(N))
    assert ok and dev == half


def test_approximant_of_itself_is_zero():
    T = OperatorMatrix.from_rows([[half, half], [half, half]])
    assert rank_one_approximant(T).deviation == 0


# ---------------------------------------------------------------------------
# block subspace


def test_block_basis_small():
    assert (block_basis(2, 3) == frac_matrix([[1, 0], [-1, 0], [0, 1]])).all()
    assert (block_basis(1, 1) == frac_matrix([[1]])).all()


def brute_force_bernstein(T, B, samples=20000):
    """min |T x|_inf over x = B y with |x|_1 = 1, y on a fine circle grid."""
    Tf = np.asarray(T.entries, dtype=float)
    Bf = np.asarray(B, dtype=float)
    th = np.linspace(0, np.pi, samples, endpoint=False)
    Y = np.stack([np.cos(th), np.sin(th)])
    X = Bf @ Y
    X /= np.abs(X).sum(axis=0)
    return np.abs(Tf @ X).max(axis=0).min()


def test_block_subspace_bernstein_value():
    B = block_basis(2, 3)
    exact = evaluate.bernstein_value(sigma(3), B)
    assert exact == Fraction(1, 3)
    assert brute_force_bernstein(sigma(3), B) == pytest.approx(1 / 3, abs=1e-4)


# ---------------------------------------------------------------------------
# trial families


def test_canonical_family():
    fam = trial_family("canonical", 3, 3)
    assert [list(v) for v in fam.vectors] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_dyadic_family_masses():
    fam = trial_family("dyadic", 2, grid=VolterraGrid(4))
    assert list(fam.vectors[0]) == [0, 0, half, half]
    assert list(fam.vectors[1]) == [0, 1, 0, 0]
    T = right_volterra(4)
    chk = fam.self_check(T)
    assert chk["norms"] == [1, 1]
    assert chk["pairs"][(0, 1)][0] == 2


def test_dyadic_family_needs_fine_grid():
    with pytest.raises(WitnessError):
        trial_family("dyadic", 3, grid=VolterraGrid(4))


# ---------------------------------------------------------------------------
# pigeonhole certificates


def test_pigeonhole_kolmogorov_n41():
    bound, tr = pigeonhole_lower_kolmogorov(sigma(41), 2)
    assert bound == Fraction(9, 20)
    assert tr.net == Fraction(1, 10) and tr.m == 41


def test_pigeonhole_gelfand_n41():
    bound, tr = pigeonhole_lower_gelfand(sigma(41), 2)
    # 41 halved classes in a ball of radius 1/2: net 1/40, bound (1/2 - 1/40)/(1 + 1/40)
    assert bound == Fraction(19, 41)
    assert bound >= Fraction(4, 11)
    assert tr.net == Fraction(1, 40)


def test_pigeonhole_n1_is_norm():
    assert pigeonhole_lower_gelfand(sigma(7), 1)[0] == 1
    assert pigeonhole_lower_kolmogorov(sigma(7), 1)[0] == 1


def test_pigeonhole_too_few_points():
    with pytest.raises(PigeonholeError):
        pigeonhole_lower_kolmogorov(sigma(3), 2)
    with pytest.raises(PigeonholeError):
        pigeonhole_lower_gelfand(sigma(3), 2)


def test_pigeonhole_kolmogorov_below_sampled_upper():
    """At N = 6 random lines W give upper bounds for d_2; the certificate sits below all."""
    N = 6
    bound, _ = pigeonhole_lower_kolmogorov(sigma(N), 2)
    Tf = np.asarray(sigma(N).entries, dtype=float)
    rng = np.random.default_rng(5)
    best = np.inf
    for u in rng.standard_normal((400, N)):
        W = u[:, None]
        best = min(best, max(linf_distance(Tf[:, j], W, Mode.FLOAT).dist for j in range(N)))
    assert float(bound) <= best


@pytest.mark.parametrize("kind", ["gelfand", "kolmogorov"])
def test_pigeonhole_replay_with_demo(kind):
    T = sigma(12)
    if kind == "gelfand":
        C = frac_matrix([[1] * 12])
        bound, tr = pigeonhole_lower_gelfand(T, 2, C)
    else:
        W = as_array([[k + 1] for k in range(12)], Mode.EXACT)
        bound, tr = pigeonhole_lower_kolmogorov(T, 2, W)
    assert tr.demo_pair is not None
    assert tr.demo_value >= bound
    ok, b2 = replay_transcript(tr, T)
    assert ok and b2 == bound
    bad = replace(tr, bound=tr.bound + Fraction(1, 100))
    assert not replay_transcript(bad, T)[0]


@given(st.integers(8, 60))
def test_pigeonhole_bounds_at_most_half(N):
    b, _ = pigeonhole_lower_kolmogorov(sigma(N), 2)
    assert 0 < b <= half
    try:
        g, _ = pigeonhole_lower_gelfand(sigma(N), 2)
    except PigeonholeError:
        return
    assert 0 < g <= half


# ---------------------------------------------------------------------------
# export format


def test_witness_file_round_trip():
    items = [build_factorization_discrete(3, 5), rank_one_approximant(sigma(5)),
             pigeonhole_lower_kolmogorov(sigma(5 * 2 + 2), 2)[1]]
    text = export_witnesses(items)
    recs = parse_witness_file(text)
    assert [r.kind for r in recs] == ["factorization", "approximant", "pigeonhole"]
    assert export_witnesses(recs[:0]) == "# sncert witness file\n"
    w0 = record_to_witness(recs[0], Mode.EXACT)
    assert (w0.A == items[0].A).all() and w0.normB == 5
    assert verify_record(recs[0], sigma(5))[0]
    assert verify_record(recs[1], sigma(5))[0]
    assert verify_record(recs[2], sigma(12))[0]


def test_witness_file_tampered_and_malformed():
    text = export_witnesses([build_factorization_discrete(2, 3)])
    rec = parse_witness_file(text)[0]
    rec.fields["bound"] = "1/2"
    assert not verify_record(rec, sigma(3))[0]
    with pytest.raises(WitnessError):
        parse_witness_file("begin factorization\nn 2\n")
    with pytest.raises(WitnessError):
        parse_witness_file("n 2\n")
    with pytest.raises(WitnessError):
        record_to_witness(parse_witness_file("begin factorization\nn 2\nend\n")[0], Mode.EXACT)


def test_to_record_rejects_unknown():
    with pytest.raises(WitnessError):
        to_record(object())


def test_block_vector_norms():
    B = block_basis(3, 5)
    assert [norm_of(l1(5), B[:, k]) for k in range(3)] == [2, 2, 1]
