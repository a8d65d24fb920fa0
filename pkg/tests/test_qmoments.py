import itertools
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from sykq.majorana import MajoranaRep, index_set, psi_R, trace_word
from sykq.partitions import PairPartition, crossings, double_factorial, pair_partitions
from sykq.qmoments import (
    BudgetExceeded,
    FiniteModel,
    FluctuationSpec,
    QParameter,
    admissible_pairings,
    classical_cumulant,
    exact_finite_n_moment,
    exact_finite_n_process_moment,
    fluctuation_limit,
    fluctuation_terms,
    frac_json,
    pairwise_sign_expectation,
    q_brownian_moment,
    q_from_model,
    q_wick_moment,
    s_pi,
    s_pi_restricted,
    wick_polynomial,
)

CROSS = PairPartition.parse("{1,3}{2,4}")
M82 = FiniteModel(8, 2)


def catalan(j):
    return math.comb(2 * j, j) // (j + 1)


def test_model_validation():
    with pytest.raises(ValueError):
        FiniteModel(7, 2)
    with pytest.raises(ValueError):
        FiniteModel(8, 5)
    assert FiniteModel(8, 2).size == 28
    assert FiniteModel(18, 3).lam == 0.5


def test_q_parameter():
    assert q_from_model(8, 2).q == pytest.approx(math.exp(-1))
    assert q_from_model(18, 3).q == pytest.approx(-math.exp(-1))
    assert QParameter.from_lambda(math.inf).q == 0
    with pytest.raises(ValueError):
        QParameter.from_lambda(-1.0)


def test_wick_polynomial_values():
    assert wick_polynomial((1,) * 6) == (5, 6, 3, 1)
    assert wick_polynomial((1, 2, 1, 2)) == (0, 1)
    assert wick_polynomial((1, 1, 2, 2)) == (1,)
    assert sum(wick_polynomial((1,) * 8)) == 105


@pytest.mark.parametrize("k", range(0, 13, 2))
def test_special_q(k):
    assert q_wick_moment((1,) * k, 1) == double_factorial(k - 1)
    assert q_wick_moment((1,) * k, -1) == 1
    assert q_wick_moment((1,) * k, 0) == catalan(k // 2)


def test_wick_is_exact_with_fractions():
    assert q_wick_moment((1,) * 4, F(1, 2)) == F(5, 2)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=0, max_size=8))
def test_admissible_pairings_match_filter(eps):
    eps = tuple(eps)
    brute = [p for p in pair_partitions(len(eps)) if all(eps[a - 1] == eps[b - 1] for a, b in p.blocks)]
    assert sorted(map(str, admissible_pairings(eps))) == sorted(map(str, brute))
    hist = wick_polynomial(eps)
    assert sum(hist) == len(brute)


@pytest.mark.parametrize("k", [1, 3, 5, 7])
def test_odd_wick_vanishes(k):
    assert q_wick_moment((1,) * k, 0.3) == 0
    assert q_brownian_moment((1.0,) * k, 0.3) == 0


def test_brownian_moment_two_point():
    # a single pair gives the covariance min(s, t)
    assert q_brownian_moment((0.5, 2.0), 0.7) == 0.5
    q = math.exp(-1)
    assert q_brownian_moment((0.5, 1, 0.5, 1), q) == pytest.approx(0.5 + 0.5 * q)


@pytest.mark.parametrize("sizes,eps,expected", [
    ((2, 2), (1, 1, 1, 1), lambda q: 2),
    ((2, 2), (1, 1, 2, 2), lambda q: 0),
    ((2, 2, 2), (1,) * 6, lambda q: 8),
    # hand count: four connecting pairings per within-interval pairing of [1,4]
    ((4, 2), (1,) * 6, lambda q: 8 + 4 * q),
])
def test_fluctuation_limit(sizes, eps, expected):
    for q in (F(0), F(1, 3), F(-1, 2)):
        assert fluctuation_limit(FluctuationSpec(sizes, eps), q) == expected(q)


def test_fluctuation_needs_even_intervals():
    spec = FluctuationSpec((1, 3), (1, 1, 1, 1))
    assert fluctuation_terms(spec) == []
    with pytest.raises(ValueError):
        FluctuationSpec((2, 2), (1, 1, 1))


def test_s_pi_small_values():
    assert s_pi(CROSS, M82) == F(1, 7)
    assert s_pi(PairPartition.parse("{1,2}{3,4}"), M82) == 1
    assert s_pi(PairPartition.parse("{1,2}"), M82) == 1


@pytest.mark.parametrize("n,q", [(4, 1), (6, 2), (8, 2), (8, 3), (10, 3)])
def test_single_crossing_closed_form(n, q):
    # tr(Psi_Q Psi_R Psi_Q Psi_R) = (-1)^(q + |Q ∩ R|) for all Q, R
    model = FiniteModel(n, q)
    assert s_pi(CROSS, model) == (-1) ** q * pairwise_sign_expectation(model)


@pytest.mark.parametrize("n,q", [(6, 2), (8, 3)])
def test_pairwise_sign_brute_force(n, q):
    idx = index_set(n, q)
    total = sum((-1) ** Q.overlap(R) for Q in idx for R in idx)
    assert pairwise_sign_expectation(FiniteModel(n, q)) == F(total, len(idx) ** 2)


def test_s_pi_six_points_against_trace_enumeration():
    model = FiniteModel(6, 2)
    idx = index_set(6, 2)
    pi = PairPartition.parse("{1,4}{2,5}{3,6}")
    total = 0
    for a, b, c in itertools.product(idx, repeat=3):
        total += trace_word([a, b, c, a, b, c])
    assert s_pi(pi, model) == F(total, len(idx) ** 3)


def test_restricted_sum():
    for V in CROSS.blocks:
        for R in index_set(8, 2)[:5]:
            assert s_pi_restricted(CROSS, V, R, M82) == F(1, 7)
    with pytest.raises(ValueError):
        s_pi_restricted(CROSS, (1, 2), index_set(8, 2)[0], M82)


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        s_pi(CROSS, FiniteModel(32, 4))
    with pytest.raises(BudgetExceeded):
        exact_finite_n_moment((1,) * 4, M82, budget=10)


def test_exact_moment_values():
    assert exact_finite_n_moment((1, 1), M82) == 1
    assert exact_finite_n_moment((1,) * 4, M82) == F(15, 7)
    assert exact_finite_n_moment((1,) * 4, FiniteModel(8, 3)) == 2 + F(3, 28)
    assert exact_finite_n_moment((1, 2, 1, 2), M82) == F(1, 7)
    assert exact_finite_n_moment((1, 1, 2, 2), M82) == 1


@pytest.mark.parametrize("k", [2, 4, 6])
def test_moment_triangle(k):
    eps = (1,) * k
    direct = exact_finite_n_moment(eps, M82)
    via_pairings = sum((s_pi(p, M82) for p in admissible_pairings(eps)), F(0))
    assert direct == via_pairings
    if k == 6:
        assert direct == F(285, 49)


@pytest.mark.parametrize("k", [1, 3, 5])
def test_odd_moments_vanish(k):
    assert exact_finite_n_moment((1,) * k, M82) == 0
    assert exact_finite_n_process_moment((F(1),) * k, M82) == 0


def test_rademacher_moment_differs_at_finite_n():
    rad = lambda m: 1 if m % 2 == 0 else 0
    # E[J^4] = 1 instead of 3 removes 2 from every diagonal sigma = {1234} term
    assert exact_finite_n_moment((1,) * 4, M82, rad) == F(15, 7) - F(2, 28)
    assert exact_finite_n_moment((1, 1), M82, rad) == 1


def test_process_moment_exact():
    t = (F(1, 2), F(1), F(1, 2), F(1))
    assert exact_finite_n_process_moment(t, M82) == F(4, 7)
    with pytest.raises(ValueError):
        exact_finite_n_process_moment((-1, 1), M82)


def test_classical_cumulant_of_gaussian_vector():
    # covariance matrix C; Gaussian joint moments via Wick; c_2 = C, c_4 = 0
    C = [[2, 1, 0], [1, 3, 1], [0, 1, 1]]

    def moment(idx):
        if len(idx) % 2:
            return 0
        total = 0
        for p in pair_partitions(len(idx)):
            w = 1
            for a, b in p.blocks:
                w *= C[idx[a - 1]][idx[b - 1]]
            total += w
        return total

    assert classical_cumulant(lambda idx: moment(tuple([0, 1][i] for i in idx)), 2) == 1
    assert classical_cumulant(lambda idx: moment(tuple([0, 1, 2, 1][i] for i in idx)), 4) == 0


def test_frac_json():
    assert frac_json(F(15, 7)) == {"num": 15, "den": 7, "float": 15 / 7}
