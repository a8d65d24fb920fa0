import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sykq.majorana import (
    MajoranaRep,
    MultiIndex,
    PauliString,
    SiteMismatch,
    apply,
    commutation_sign,
    dense_matrix,
    index_set,
    majorana,
    multiply,
    normalized_trace,
    psi_R,
    psi_table,
    trace_word,
    word_product,
)


def pauli(r):
    return st.builds(lambda x, z, ph: PauliString(r, x, z, ph),
                     st.integers(0, 2**r - 1), st.integers(0, 2**r - 1), st.integers(0, 3))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda r: st.tuples(pauli(r), pauli(r))))
def test_product_matches_dense(pq):
    P, Q = pq
    assert np.allclose(dense_matrix(P * Q), dense_matrix(P) @ dense_matrix(Q), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(pauli))
def test_hermitian_flag_matches_dense(P):
    M = dense_matrix(P)
    assert P.is_hermitian() == np.allclose(M, M.conj().T)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4).flatmap(pauli), st.integers(0, 2**31 - 1))
def test_apply_matches_dense(P, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((1 << P.r, 3)) + 1j * rng.standard_normal((1 << P.r, 3))
    assert np.allclose(apply(P, v), dense_matrix(P) @ v, atol=1e-12)
    assert np.allclose(apply(P, v[:, 0]), dense_matrix(P) @ v[:, 0], atol=1e-12)


def test_from_label_and_str():
    P = PauliString.from_label("XZY1")
    assert P.letters() == ["X", "Z", "Y", "1"]
    assert str(P) == "i^0 · X Z Y 1"
    assert str(PauliString.from_label("XZY1", phase=1)) == "i^1 · X Z Y 1"
    Y = np.array([[0, -1j], [1j, 0]])
    assert np.allclose(dense_matrix(PauliString.from_label("Y")), Y)


def test_site_mismatch():
    with pytest.raises(SiteMismatch):
        multiply(PauliString.identity(2), PauliString.identity(3))


def test_normalized_trace():
    assert normalized_trace(PauliString(3, 0, 0, 2)) == -1
    assert normalized_trace(PauliString.from_label("X1")) == 0


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_majoranas_are_clifford_generators(n):
    rep = MajoranaRep(n)
    mats = [dense_matrix(majorana(i, rep)) for i in range(1, n + 1)]
    I = np.eye(1 << (n // 2))
    for a, b in itertools.product(range(n), repeat=2):
        anti = mats[a] @ mats[b] + mats[b] @ mats[a]
        assert np.allclose(anti, 2 * I * (a == b), atol=1e-12)
    assert all(np.allclose(m, m.conj().T) for m in mats)


def test_majorana_index_bounds():
    rep = MajoranaRep(4)
    with pytest.raises(IndexError):
        majorana(0, rep)
    with pytest.raises(IndexError):
        majorana(5, rep)


def test_multi_index_validation():
    with pytest.raises(ValueError):
        MultiIndex((2, 1), 4)
    with pytest.raises(ValueError):
        MultiIndex((1, 2, 3), 4)  # q > n/2
    with pytest.raises(ValueError):
        MultiIndex((1, 9), 8)


def test_index_set_is_lexicographic():
    got = [R.entries for R in index_set(4, 2)]
    assert got == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


@pytest.mark.parametrize("n,q", [(4, 1), (4, 2), (6, 3), (8, 2), (8, 3)])
def test_psi_r_is_hermitian_and_squares_to_one(n, q):
    rep = MajoranaRep(n)
    for R in index_set(n, q):
        P = psi_R(R, rep)
        assert P.is_hermitian()
        sq = P * P
        assert sq.is_identity() and sq.phase == 0


@pytest.mark.parametrize("n,q", [(6, 2), (8, 3)])
def test_commutation_sign_against_dense(n, q):
    rep = MajoranaRep(n)
    idx = index_set(n, q)
    rng = random.Random(3)
    for _ in range(40):
        Q, R = rng.sample(idx, 2)
        A, B = dense_matrix(psi_R(Q, rep)), dense_matrix(psi_R(R, rep))
        s = commutation_sign(Q, R)
        assert np.allclose(A @ B, s * (B @ A), atol=1e-12)
        assert s == (-1) ** (q * q - Q.overlap(R))


def test_commutation_sign_rejects_equal():
    R = MultiIndex((1, 2), 4)
    with pytest.raises(ValueError):
        commutation_sign(R, R)


@pytest.mark.parametrize("n,q,k", [(6, 2, 4), (8, 3, 4), (8, 2, 6)])
def test_trace_word_against_dense(n, q, k):
    rep = MajoranaRep(n)
    idx = index_set(n, q)
    rng = random.Random(11)
    dim = 1 << (n // 2)
    for _ in range(30):
        alpha = [rng.choice(idx) for _ in range(k)]
        M = np.eye(dim, dtype=complex)
        for R in alpha:
            M = M @ dense_matrix(psi_R(R, rep))
        assert abs(np.trace(M) / dim - trace_word(alpha)) < 1e-12
        assert word_product(alpha).r == n // 2


def test_psi_table_matches_scalar_path():
    table = psi_table(8, 3)
    rep = MajoranaRep(8)
    for rank in (0, 7, len(table) - 1):
        P = psi_R(table.indices[rank], rep)
        assert (table.x[rank], table.z[rank], table.phase[rank]) == (P.x, P.z, P.phase)
    a, b = np.array([3]), np.array([10])
    x, z, ph = table.word([a, b])
    P = psi_R(table.indices[3], rep) * psi_R(table.indices[10], rep)
    assert (x[0], z[0], ph[0]) == (P.x, P.z, P.phase)


def test_dense_cap():
    with pytest.raises(ValueError):
        dense_matrix(PauliString.identity(9))
