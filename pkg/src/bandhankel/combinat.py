"""Pair-partition enumeration and split-class counting.

A pair partition splits {1, ..., m} into unordered blocks of size two.
When the ground set is viewed as a left segment {1, ..., p} followed by
a right segment {p+1, ..., p+q}, blocks either stay inside one segment
(self pairs) or straddle the boundary (cross pairs).  Three families of
partitions are counted here:

* ``delta2``: odd-even pair partitions (every block joins an odd and an
  even index) with at least one cross pair.
* ``delta2_tilde``: partitions with at least one cross pair in which
  every self pair is odd-even and every cross pair joins two indices of
  the same parity.
* ``delta24``: partitions made of one four-element block and pairs,
  where the four-block takes an odd-even pair from each segment and all
  remaining pairs are odd-even pairs contained in a single segment.

The weighted total ``r_value = delta2 + delta2_tilde + 2 * delta24``
is the combinatorial factor consumed by the limiting covariance
evaluation in :mod:`bandhankel.theory`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

from .errors import BudgetError, ValidationError

# Largest ground-set size enumerated in one call; 13!! = 135135 partitions.
ENUMERATION_CAP = 14


def double_factorial(k: int) -> int:
    """Product k * (k - 2) * (k - 4) * ...; equals 1 for k <= 0."""
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


def _canonical_blocks(blocks) -> tuple[tuple[int, int], ...]:
    ordered = tuple(sorted(tuple(sorted(b)) for b in blocks))
    return ordered


@dataclass(frozen=True)
class PairPartition:
    """A partition of {1, ..., size} into blocks of exactly two indices."""

    size: int
    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self):
        blocks = _canonical_blocks(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if self.size <= 0 or self.size % 2 != 0:
            raise ValidationError(f"pair partition size must be even and positive, got {self.size}")
        covered = [i for b in blocks for i in b]
        if any(len(b) != 2 or b[0] == b[1] for b in blocks):
            raise ValidationError("every block must contain exactly two distinct indices")
        if sorted(covered) != list(range(1, self.size + 1)):
            raise ValidationError("blocks must partition {1, ..., size} exactly")


@dataclass(frozen=True)
class SplitContext:
    """Ground set {1, ..., p+q} split into a left part {1..p} and right part {p+1..p+q}."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValidationError(f"split sizes must satisfy p >= 1 and q >= 1, got ({self.p}, {self.q})")

    @property
    def size(self) -> int:
        return self.p + self.q


@dataclass(frozen=True)
class FourBlockPartition:
    """A partition of {1, ..., size} with one block of four indices, the rest pairs."""

    size: int
    four_block: tuple[int, int, int, int]
    pair_blocks: tuple[tuple[int, int], ...]

    def __post_init__(self):
        four = tuple(sorted(self.four_block))
        pairs = _canonical_blocks(self.pair_blocks)
        object.__setattr__(self, "four_block", four)
        object.__setattr__(self, "pair_blocks", pairs)
        covered = list(four) + [i for b in pairs for i in b]
        if len(four) != 4 or len(set(four)) != 4:
            raise ValidationError("the four-block must contain four distinct indices")
        if any(len(b) != 2 or b[0] == b[1] for b in pairs):
            raise ValidationError("every pair block must contain exactly two distinct indices")
        if sorted(covered) != list(range(1, self.size + 1)):
            raise ValidationError("blocks must partition {1, ..., size} exactly")


@dataclass(frozen=True)
class ClassTally:
    """Counts of the three split classes for one (p, q) and their weighted total."""

    p: int
    q: int
    delta2: int
    delta2_tilde: int
    delta24: int
    r_value: int


def enumerate_pair_partitions(m: int, cap: int = ENUMERATION_CAP) -> list[PairPartition]:
    """Enumerate all pair partitions of {1, ..., m}.

    The order is deterministic: partitions are generated lexicographically,
    always pairing the smallest unmatched index first.  Odd ``m`` yields an
    empty list since no pair partition exists.

    Raises
    ------
    ValidationError
        If ``m`` is not a positive integer.
    BudgetError
        If ``m`` exceeds ``cap`` (the count (m-1)!! grows too fast).
    """
    if not isinstance(m, int) or m < 1:
        raise ValidationError(f"ground-set size must be a positive integer, got {m!r}")
    if m % 2 != 0:
        return []
    if m > cap:
        raise BudgetError(
            f"refusing to enumerate pair partitions of {m} elements "
            f"((m-1)!! = {double_factorial(m - 1)} exceeds the cap m <= {cap})"
        )

    out: list[PairPartition] = []

    def rec(remaining: tuple[int, ...], acc: list[tuple[int, int]]):
        if not remaining:
            out.append(PairPartition(m, tuple(acc)))
            return
        first = remaining[0]
        for idx in range(1, len(remaining)):
            partner = remaining[idx]
            acc.append((first, partner))
            rec(remaining[1:idx] + remaining[idx + 1:], acc)
            acc.pop()

    rec(tuple(range(1, m + 1)), [])
    return out


def is_odd_even(partition: PairPartition) -> bool:
    """True iff every block pairs one odd index with one even index."""
    return all((a + b) % 2 == 1 for a, b in partition.blocks)


def classify(partition: PairPartition, ctx: SplitContext) -> tuple[bool, bool]:
    """Classify one pair partition against a split.

    Returns
    -------
    (in_delta2, in_delta2_tilde)
        ``in_delta2``: the partition is odd-even and has at least one
        cross pair.  ``in_delta2_tilde``: it has at least one cross pair,
        every self pair is odd-even, and every cross pair joins two
        indices of the same parity.  The flags are mutually exclusive
        because a cross pair cannot be both odd-even and same-parity.
    """
    if partition.size != ctx.size:
        raise ValidationError(
            f"partition covers {partition.size} indices but the split covers {ctx.size}"
        )
    cross = [b for b in partition.blocks if b[0] <= ctx.p < b[1]]
    if not cross:
        return (False, False)
    in_delta2 = is_odd_even(partition)
    self_ok = all((a + b) % 2 == 1 for a, b in partition.blocks if not (a <= ctx.p < b))
    cross_ok = all((a + b) % 2 == 0 for a, b in cross)
    return (in_delta2, self_ok and cross_ok)


def _odd_even_matchings(odds: tuple[int, ...], evens: tuple[int, ...]):
    """All perfect matchings pairing each odd index with an even index."""
    if len(odds) != len(evens):
        return
    for perm in permutations(evens):
        yield tuple((o, e) for o, e in zip(odds, perm))


def enumerate_four_block_partitions(p: int, q: int, cap: int = ENUMERATION_CAP) -> list[FourBlockPartition]:
    """Enumerate partitions of {1, ..., p+q} with one straddling four-block.

    Generated partitions satisfy: the four-block holds an odd-even pair
    from {1..p} and an odd-even pair from {p+1..p+q}; every remaining
    block is an odd-even pair contained entirely in one segment.
    """
    ctx = SplitContext(p, q)
    m = ctx.size
    if m % 2 != 0 or p < 2 or q < 2:
        return []
    if m > cap:
        raise BudgetError(f"refusing four-block enumeration on {m} elements (cap m <= {cap})")

    left = range(1, p + 1)
    right = range(p + 1, p + q + 1)
    l_odd = tuple(i for i in left if i % 2 == 1)
    l_even = tuple(i for i in left if i % 2 == 0)
    r_odd = tuple(i for i in right if i % 2 == 1)
    r_even = tuple(i for i in right if i % 2 == 0)

    out: list[FourBlockPartition] = []
    for lo in l_odd:
        for le in l_even:
            rem_l_odd = tuple(i for i in l_odd if i != lo)
            rem_l_even = tuple(i for i in l_even if i != le)
            left_matchings = list(_odd_even_matchings(rem_l_odd, rem_l_even))
            if not left_matchings:
                continue
            for ro in r_odd:
                for re in r_even:
                    rem_r_odd = tuple(i for i in r_odd if i != ro)
                    rem_r_even = tuple(i for i in r_even if i != re)
                    for lm in left_matchings:
                        for rm in _odd_even_matchings(rem_r_odd, rem_r_even):
                            out.append(FourBlockPartition(m, (lo, le, ro, re), lm + rm))
    return out


def count_delta24(p: int, q: int, cap: int = ENUMERATION_CAP) -> int:
    """Exact count of straddling four-block partitions for the (p, q) split.

    Zero when p+q is odd or either segment is shorter than two.
    """
    if p < 1 or q < 1:
        raise ValidationError(f"split sizes must be >= 1, got ({p}, {q})")
    if (p + q) % 2 != 0 or p < 2 or q < 2:
        return 0
    return len(enumerate_four_block_partitions(p, q, cap=cap))


@lru_cache(maxsize=None)
def class_counts(p: int, q: int) -> ClassTally:
    """Count all three split classes by exhaustive enumeration.

    Returns an all-zero tally when p+q is odd.  The weighted total is
    ``r_value = delta2 + delta2_tilde + 2 * delta24``.
    """
    if not isinstance(p, int) or not isinstance(q, int) or p < 1 or q < 1:
        raise ValidationError(f"split sizes must be positive integers, got ({p!r}, {q!r})")
    if (p + q) % 2 != 0:
        return ClassTally(p, q, 0, 0, 0, 0)
    ctx = SplitContext(p, q)
    d2 = 0
    d2t = 0
    for partition in enumerate_pair_partitions(p + q):
        in_d2, in_d2t = classify(partition, ctx)
        d2 += in_d2
        d2t += in_d2t
    d24 = count_delta24(p, q)
    return ClassTally(p, q, d2, d2t, d24, d2 + d2t + 2 * d24)
