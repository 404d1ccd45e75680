"""Pair-partition enumeration and split-class counting."""

import math

import pytest

from bandhankel.combinat import (
    ClassTally,
    FourBlockPartition,
    PairPartition,
    SplitContext,
    class_counts,
    classify,
    count_delta24,
    double_factorial,
    enumerate_four_block_partitions,
    enumerate_pair_partitions,
    is_odd_even,
)
from bandhankel.errors import BudgetError, ValidationError


@pytest.mark.parametrize("k,expected", [(-1, 1), (0, 1), (1, 1), (2, 2), (3, 3), (4, 8), (5, 15), (7, 105), (9, 945), (11, 10395)])
def test_double_factorial_values(k, expected):
    assert double_factorial(k) == expected


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_pair_partition_count_is_double_factorial(m):
    partitions = enumerate_pair_partitions(2 * m)
    assert len(partitions) == double_factorial(2 * m - 1)
    assert len(set(p.blocks for p in partitions)) == len(partitions)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_odd_even_partition_count_is_factorial(m):
    count = sum(is_odd_even(p) for p in enumerate_pair_partitions(2 * m))
    assert count == math.factorial(m)


@pytest.mark.parametrize("m", [1, 3, 5, 7])
def test_odd_ground_set_has_no_pair_partitions(m):
    assert enumerate_pair_partitions(m) == []


def test_enumeration_rejects_bad_sizes():
    with pytest.raises(ValidationError):
        enumerate_pair_partitions(0)
    with pytest.raises(ValidationError):
        enumerate_pair_partitions(-2)


def test_enumeration_cap():
    with pytest.raises(BudgetError):
        enumerate_pair_partitions(16)
    with pytest.raises(BudgetError):
        enumerate_pair_partitions(4, cap=3)


def test_enumeration_is_deterministic():
    first = enumerate_pair_partitions(8)
    second = enumerate_pair_partitions(8)
    assert [p.blocks for p in first] == [p.blocks for p in second]


def test_blocks_are_canonical_and_cover():
    for partition in enumerate_pair_partitions(6):
        flat = sorted(i for block in partition.blocks for i in block)
        assert flat == list(range(1, 7))
        assert all(a < b for a, b in partition.blocks)
        assert list(partition.blocks) == sorted(partition.blocks)


def test_pair_partition_validation():
    with pytest.raises(ValidationError):
        PairPartition(4, ((1, 1), (2, 3)))
    with pytest.raises(ValidationError):
        PairPartition(4, ((1, 2), (3, 5)))
    with pytest.raises(ValidationError):
        PairPartition(4, ((1, 2),))
    with pytest.raises(ValidationError):
        PairPartition(3, ((1, 2),))


@pytest.mark.parametrize(
    "blocks,expected",
    [(((1, 2), (3, 4)), True), (((1, 3), (2, 4)), False), (((1, 4), (2, 3)), True)],
)
def test_is_odd_even(blocks, expected):
    assert is_odd_even(PairPartition(4, blocks)) is expected


@pytest.mark.parametrize(
    "blocks,expected",
    [
        (((1, 4), (2, 3)), (True, False)),
        (((1, 3), (2, 4)), (False, True)),
        (((1, 2), (3, 4)), (False, False)),
    ],
)
def test_classify_on_the_two_two_split(blocks, expected):
    assert classify(PairPartition(4, blocks), SplitContext(2, 2)) == expected


def test_classify_rejects_size_mismatch():
    with pytest.raises(ValidationError):
        classify(PairPartition(4, ((1, 2), (3, 4))), SplitContext(3, 3))


@pytest.mark.parametrize("p,q", [(2, 2), (2, 4), (4, 2), (3, 3), (1, 3), (4, 4)])
def test_classify_flags_are_mutually_exclusive(p, q):
    ctx = SplitContext(p, q)
    for partition in enumerate_pair_partitions(p + q):
        in_d2, in_d2t = classify(partition, ctx)
        assert not (in_d2 and in_d2t)


def test_split_context_validation():
    with pytest.raises(ValidationError):
        SplitContext(0, 2)
    with pytest.raises(ValidationError):
        SplitContext(2, -1)


def test_four_block_partition_validation():
    with pytest.raises(ValidationError):
        FourBlockPartition(6, (1, 2, 3, 3), ((4, 5),))
    with pytest.raises(ValidationError):
        FourBlockPartition(6, (1, 2, 3, 4), ((5, 5),))
    with pytest.raises(ValidationError):
        FourBlockPartition(6, (1, 2, 3, 4), ())


@pytest.mark.parametrize("p,q,expected", [(2, 2, 1), (1, 1, 0), (2, 3, 0), (3, 3, 0), (3, 5, 0), (1, 4, 0)])
def test_count_delta24_small_cases(p, q, expected):
    assert count_delta24(p, q) == expected


@pytest.mark.parametrize("p,q", [(2, 2), (2, 4), (4, 2), (4, 4), (4, 6), (6, 6)])
def test_count_delta24_matches_selection_count(p, q):
    # Hand count: pick the odd-even pair entering the four-block on each
    # side ((p/2)^2 ways left, (q/2)^2 right), then match the leftover
    # odds to evens within each side ((p/2-1)! and (q/2-1)! ways).
    expected = (p // 2) ** 2 * math.factorial(p // 2 - 1)
    expected *= (q // 2) ** 2 * math.factorial(q // 2 - 1)
    assert count_delta24(p, q) == expected


def test_four_block_enumeration_structure():
    for partition in enumerate_four_block_partitions(4, 4):
        assert len(partition.four_block) == 4
        left = [i for i in partition.four_block if i <= 4]
        right = [i for i in partition.four_block if i > 4]
        assert len(left) == 2 and len(right) == 2
        assert sum(left) % 2 == 1 and sum(right) % 2 == 1
        for a, b in partition.pair_blocks:
            assert (a <= 4) == (b <= 4)
            assert (a + b) % 2 == 1


def test_count_delta24_rejects_bad_split():
    with pytest.raises(ValidationError):
        count_delta24(0, 2)


def test_class_counts_two_two():
    tally = class_counts(2, 2)
    assert tally == ClassTally(2, 2, 1, 1, 1, 4)


def test_class_counts_one_one():
    tally = class_counts(1, 1)
    assert (tally.delta2, tally.delta2_tilde, tally.delta24, tally.r_value) == (1, 0, 0, 1)


def test_class_counts_odd_total_is_zero():
    tally = class_counts(2, 3)
    assert (tally.delta2, tally.delta2_tilde, tally.delta24, tally.r_value) == (0, 0, 0, 0)


@pytest.mark.parametrize("p,q", [(2, 2), (2, 4), (4, 4), (2, 6), (4, 6)])
def test_r_value_invariant(p, q):
    tally = class_counts(p, q)
    assert tally.r_value == tally.delta2 + tally.delta2_tilde + 2 * tally.delta24


@pytest.mark.parametrize("p,q", [(2, 4), (2, 6), (4, 6)])
def test_delta2_is_symmetric_for_even_splits(p, q):
    assert class_counts(p, q).delta2 == class_counts(q, p).delta2


def test_class_counts_rejects_bad_arguments():
    with pytest.raises(ValidationError):
        class_counts(0, 2)
    with pytest.raises(ValidationError):
        class_counts(2, -1)
