import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sykq.qfock import (
    build_operators,
    cauchy_continued_fraction,
    continued_fraction_moments,
    inversions,
    q_inner,
    q_inner_bruteforce,
    q_integer,
    semicircle_cauchy,
    vacuum_moment,
)
from sykq.qmoments import q_wick_moment


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 3), max_size=5), st.lists(st.integers(1, 3), max_size=5),
       st.floats(-0.95, 0.95))
def test_recursive_inner_matches_permutation_sum(u, v, q):
    assert q_inner(u, v, q) == pytest.approx(q_inner_bruteforce(tuple(u), tuple(v), q), abs=1e-12)


def test_inner_product_special_cases():
    w = (1, 2, 1)
    # q = 0 is the full Fock space, q = 1 counts matching permutations
    assert q_inner(w, w, 0) == 1
    assert q_inner(w, w, 1) == 2
    assert q_inner((1, 1), (1, 1), 0.5) == 1.5  # [2]_q!
    assert inversions((2, 0, 1)) == 2


@pytest.mark.parametrize("q", [-0.9, 0.0, 0.5])
def test_annihilation_is_adjoint_of_creation(q):
    ops = build_operators(2, q, 3)
    G = ops.gram
    for A, Astar in zip(ops.annihilate, ops.create):
        # <A* u, v> = <u, A v> on degrees where neither side is truncated
        lhs = Astar.T @ G
        rhs = G @ A
        keep = np.array([len(w) < ops.d for w in ops.words])
        assert np.allclose(lhs[np.ix_(keep, keep)], rhs[np.ix_(keep, keep)], atol=1e-12)


def test_commutation_relation():
    q = 0.3
    ops = build_operators(2, q, 4)
    keep = np.array([len(w) < ops.d for w in ops.words])
    for i, j in itertools.product(range(2), repeat=2):
        rel = ops.annihilate[i] @ ops.create[j] - q * ops.create[j] @ ops.annihilate[i]
        target = np.eye(ops.dim) * (i == j)
        assert np.allclose(rel[:, keep], target[:, keep], atol=1e-12)


def test_gram_positive_definite():
    ops = build_operators(3, 0.7, 3)
    assert np.linalg.eigvalsh(ops.gram).min() > 0


def test_build_rejects_boundary_q():
    with pytest.raises(ValueError):
        build_operators(1, 1.0, 2)


@pytest.mark.parametrize("q", [-0.9, 0.0, 0.5])
def test_vacuum_moment_equals_wick(q):
    for k in range(1, 7):
        for w in itertools.product((1, 2), repeat=k):
            assert abs(vacuum_moment(w, q) - q_wick_moment(w, q)) < 1e-10


def test_vacuum_truncation_guard():
    assert vacuum_moment((1, 1, 1, 1), 0.2, d=5) == pytest.approx(2.2)
    with pytest.raises(ValueError):
        vacuum_moment((1, 1, 1, 1), 0.2, d=1)


def test_q_integer():
    assert q_integer(3, 0.5) == 1.75
    assert q_integer(4, 1) == 4


def test_cauchy_semicircle():
    z = np.array([0.3 + 0.2j, -1 + 1j, 4 + 0.01j])
    assert np.allclose(cauchy_continued_fraction(z, 0.0), semicircle_cauchy(z), atol=1e-9)
    # near the real point 3, outside the support [-2, 2]
    assert cauchy_continued_fraction(3 + 1e-12j, 0.0).real == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-9)


def test_cauchy_gaussian_end_has_unit_second_moment():
    g = cauchy_continued_fraction(200j, 0.5, depth=50)
    # z G(z) = 1 + m2/z^2 + m4/z^4 + ..., with m2 = 1 and m4 = 2 + q
    z = 200j
    assert g * z == pytest.approx(1 + 1 / z**2 + 2.5 / z**4, abs=1e-12)


def test_cauchy_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        cauchy_continued_fraction(1.0, 0.0)
    with pytest.raises(ValueError):
        cauchy_continued_fraction(1 - 1j, 0.0)


@pytest.mark.parametrize("q", [0.0, 0.5, -0.5])
def test_series_moments(q):
    m = continued_fraction_moments(q, depth=20, order=10)
    for k in range(11):
        assert m[k] == pytest.approx(float(q_wick_moment((1,) * k, q)), abs=1e-8)
