import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from sykq.partitions import (
    IncompatiblePartitions,
    IntervalPartition,
    PairPartition,
    SetPartition,
    crossings,
    double_factorial,
    enumerate_pair_partitions,
    enumerate_set_partitions,
    join,
    kernel,
    leq,
    mobius_to_top,
    one_partition,
    pair_partitions,
    restrict,
    singletons,
)

BELL = [1, 1, 2, 5, 15, 52, 203, 877]


def labels(k):
    return st.lists(st.integers(0, 3), min_size=k, max_size=k)


@pytest.mark.parametrize("k", range(0, 13, 2))
def test_pair_partition_count_is_double_factorial(k):
    pis = list(enumerate_pair_partitions(k))
    assert len(pis) == double_factorial(k - 1)
    assert len(set(pis)) == len(pis)
    assert all(p.is_pairing() for p in pis)


@pytest.mark.parametrize("k", [1, 3, 5, 7])
def test_odd_k_has_no_pairings(k):
    assert list(enumerate_pair_partitions(k)) == []


@pytest.mark.parametrize("k", range(8))
def test_set_partition_count_is_bell(k):
    assert sum(1 for _ in enumerate_set_partitions(k)) == BELL[k]


def test_k4_enumeration_order_and_crossings():
    got = [str(p) for p in pair_partitions(4)]
    assert got == ["{1,2}{3,4}", "{1,3}{2,4}", "{1,4}{2,3}"]
    assert [crossings(p) for p in pair_partitions(4)] == [0, 1, 0]


def test_crossing_histogram_k6():
    # crossing numbers over P_2(6): 5 noncrossing, 6 with one, 3 with two, 1 with three
    hist = [0] * 4
    for p in pair_partitions(6):
        hist[crossings(p)] += 1
    assert hist == [5, 6, 3, 1]


@pytest.mark.parametrize("k", [2, 4, 6, 8])
def test_noncrossing_pairings_are_catalan(k):
    nc = sum(1 for p in pair_partitions(k) if crossings(p) == 0)
    assert nc == math.comb(k, k // 2) // (k // 2 + 1)


def test_parse_and_str_roundtrip():
    p = SetPartition.parse("{2,4}{1,3}")
    assert str(p) == "{1,3}{2,4}"
    assert SetPartition.parse(str(p)) == p
    assert PairPartition.parse("{1,3}{2,4}") == p


def test_pair_partition_rejects_non_pairs():
    with pytest.raises(ValueError):
        PairPartition.parse("{1,2,3}{4}")


def test_blocks_must_cover_range():
    with pytest.raises(ValueError):
        SetPartition.from_blocks([(1, 2), (4,)], k=4)


def test_kernel_and_rgs():
    assert kernel("abab") == SetPartition.parse("{1,3}{2,4}")
    assert kernel([5, 5, 7]).rgs == (0, 0, 1)
    assert SetPartition.from_labels([9, 1, 9]) == kernel([9, 1, 9])


def test_join_of_crossing_pairs_is_top():
    a = SetPartition.parse("{1,2}{3,4}")
    b = SetPartition.parse("{1,3}{2,4}")
    assert join(a, b) == one_partition(4)


def test_join_incompatible_sizes():
    with pytest.raises(IncompatiblePartitions):
        join(one_partition(3), one_partition(4))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7).flatmap(lambda k: st.tuples(labels(k), labels(k))))
def test_join_is_least_upper_bound(pair):
    a, b = kernel(pair[0]), kernel(pair[1])
    j = join(a, b)
    assert leq(a, j) and leq(b, j)
    # every common upper bound sits above the join
    for c in enumerate_set_partitions(a.k):
        if leq(a, c) and leq(b, c):
            assert leq(j, c)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7).flatmap(labels))
def test_leq_bounds(f):
    p = kernel(f)
    assert leq(singletons(p.k), p) and leq(p, one_partition(p.k))
    assert join(p, p) == p


@pytest.mark.parametrize("k", range(1, 7))
def test_mobius_to_top_sums_to_zero(k):
    # sum over the whole lattice of mu(sigma, 1) vanishes for k >= 2
    total = sum(mobius_to_top(s) for s in enumerate_set_partitions(k))
    assert total == (1 if k == 1 else 0)


def test_mobius_values():
    assert mobius_to_top(singletons(4)) == -6  # (-1)^3 3!
    assert mobius_to_top(SetPartition.parse("{1,2}{3}{4}")) == 2


def test_restrict_to_interval():
    p = SetPartition.parse("{1,4}{2,3}{5,6}")
    assert restrict(p, [5, 6]) == SetPartition.parse("{1,2}")
    assert restrict(p, [2, 3]) == SetPartition.parse("{1,2}")


def test_interval_partition():
    th = IntervalPartition((2, 3, 1))
    assert th.k == 6
    assert [list(r) for r in th.intervals] == [[1, 2], [3, 4, 5], [6]]
    assert th.partition() == SetPartition.parse("{1,2}{3,4,5}{6}")


def test_double_factorial_small():
    assert [double_factorial(n) for n in (-1, 0, 1, 3, 5, 7)] == [1, 1, 1, 3, 15, 105]


def test_equality_across_subclass():
    a = SetPartition.parse("{1,2}{3,4}")
    b = PairPartition.parse("{1,2}{3,4}")
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
