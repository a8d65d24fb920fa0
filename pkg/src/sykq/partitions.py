"""Set partitions and pair partitions of [k] = {1, ..., k}.

Partitions are immutable and stored canonically: blocks sorted by their
minimum, elements sorted inside each block. Elements are 1-based throughout
this module to match the usual combinatorial notation.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Iterator, Sequence


class IncompatiblePartitions(ValueError):
    """Raised when two partitions live on ground sets of different size."""


def _canonical(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    cleaned = [tuple(sorted(b)) for b in blocks]
    return tuple(sorted((b for b in cleaned if b), key=lambda b: b[0]))


@dataclass(frozen=True, eq=False)
class SetPartition:
    """A partition of [k] in canonical block form.

    Equality and hashing are structural, so a :class:`PairPartition` equals
    the plain :class:`SetPartition` with the same blocks.
    """

    k: int
    blocks: tuple[tuple[int, ...], ...]

    def __eq__(self, other):
        if not isinstance(other, SetPartition):
            return NotImplemented
        return self.k == other.k and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.k, self.blocks))

    def __post_init__(self):
        blocks = _canonical(self.blocks)
        seen = sorted(x for b in blocks for x in b)
        if seen != list(range(1, self.k + 1)):
            raise ValueError(f"blocks {blocks} do not partition [1, {self.k}]")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], k: int | None = None):
        blocks = [tuple(b) for b in blocks]
        if k is None:
            k = sum(len(b) for b in blocks)
        return cls(k, tuple(blocks))

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable]):
        """Partition of positions 1..k by equal label (the kernel of ``labels``)."""
        fibers: dict[Hashable, list[int]] = {}
        for pos, lab in enumerate(labels, start=1):
            fibers.setdefault(lab, []).append(pos)
        return cls(len(labels), tuple(tuple(f) for f in fibers.values()))

    @classmethod
    def parse(cls, text: str):
        """Inverse of ``str``: ``"{1,3}{2,4}"`` -> partition of [4]."""
        groups = re.findall(r"\{([^{}]*)\}", text)
        blocks = [tuple(int(x) for x in g.split(",") if x.strip()) for g in groups]
        return cls.from_blocks(blocks)

    @property
    def rgs(self) -> tuple[int, ...]:
        """Restricted growth string: entry i is the index of the block holding i+1."""
        out = [0] * self.k
        for b_idx, block in enumerate(self.blocks):
            for x in block:
                out[x - 1] = b_idx
        return tuple(out)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)

    def is_pairing(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)


class PairPartition(SetPartition):
    """A set partition all of whose blocks have exactly two elements."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_pairing():
            raise ValueError(f"{self} is not a pair partition")

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return self.blocks  # type: ignore[return-value]


@dataclass(frozen=True)
class IntervalPartition:
    """Consecutive intervals T_1 = [1, k_1], T_2 = [k_1 + 1, k_1 + k_2], ..."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s <= 0 for s in sizes):
            raise ValueError(f"interval sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def k(self) -> int:
        return sum(self.sizes)

    @property
    def intervals(self) -> tuple[range, ...]:
        out, start = [], 1
        for s in self.sizes:
            out.append(range(start, start + s))
            start += s
        return tuple(out)

    def partition(self) -> SetPartition:
        return SetPartition(self.k, tuple(tuple(t) for t in self.intervals))


def double_factorial(n: int) -> int:
    """n!! with the convention (-1)!! = 0!! = 1."""
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def _pairings(items: tuple[int, ...]) -> Iterator[list[tuple[int, int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for j, partner in enumerate(rest):
        for tail in _pairings(rest[:j] + rest[j + 1:]):
            yield [(first, partner)] + tail


def enumerate_pair_partitions(k: int) -> Iterator[PairPartition]:
    """Yield every pair partition of [k], (k-1)!! of them.

    The smallest remaining element is paired with each larger one in turn,
    so the order is deterministic. Odd ``k`` yields nothing; ``k = 0`` yields
    the empty pairing.
    """
    if k < 0 or k % 2:
        return
    for pairs in _pairings(tuple(range(1, k + 1))):
        yield PairPartition(k, tuple(pairs))


@lru_cache(maxsize=None)
def pair_partitions(k: int) -> tuple[PairPartition, ...]:
    """Cached tuple form of :func:`enumerate_pair_partitions`."""
    return tuple(enumerate_pair_partitions(k))


def enumerate_set_partitions(k: int) -> Iterator[SetPartition]:
    """Yield all Bell(k) partitions of [k] via restricted growth strings."""
    if k == 0:
        yield SetPartition(0, ())
        return
    rgs = [0] * k

    def rec(i: int, top: int):
        if i == k:
            yield SetPartition.from_labels(rgs)
            return
        for v in range(top + 2):
            rgs[i] = v
            yield from rec(i + 1, max(top, v))

    rgs[0] = 0
    yield from rec(1, 0)


def crossings(pi: SetPartition) -> int:
    """Number of unordered crossing block pairs v1 < w1 < v2 < w2."""
    pairs = pi.blocks
    count = 0
    for a in range(len(pairs)):
        v1, v2 = pairs[a][0], pairs[a][-1]
        for b in range(a + 1, len(pairs)):
            w1, w2 = pairs[b][0], pairs[b][-1]
            # blocks are sorted by minimum, so v1 < w1
            if w1 < v2 < w2:
                count += 1
    return count


def _check_same_k(a: SetPartition, b: SetPartition):
    if a.k != b.k:
        raise IncompatiblePartitions(f"ground sets differ: [{a.k}] vs [{b.k}]")


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


def _join_blocks(k: int, *partitions: SetPartition) -> SetPartition:
    uf = _UnionFind(k + 1)
    for p in partitions:
        for block in p.blocks:
            for x in block[1:]:
                uf.union(block[0], x)
    return SetPartition.from_labels([uf.find(i) for i in range(1, k + 1)])


def join(sigma: SetPartition, tau: SetPartition) -> SetPartition:
    """Least upper bound of two partitions in the refinement lattice."""
    _check_same_k(sigma, tau)
    return _join_blocks(sigma.k, sigma, tau)


def leq(sigma: SetPartition, tau: SetPartition) -> bool:
    """True iff every block of ``sigma`` lies inside a block of ``tau``."""
    _check_same_k(sigma, tau)
    label = tau.rgs
    return all(len({label[x - 1] for x in block}) == 1 for block in sigma.blocks)


def kernel(f: Sequence[Hashable]) -> SetPartition:
    """Partition of positions 1..k into the nonempty fibers of ``f``."""
    return SetPartition.from_labels(f)


def mobius_to_top(sigma: SetPartition) -> int:
    """Möbius value mu(sigma, 1_m) = (-1)^(|sigma|-1) (|sigma|-1)!."""
    b = len(sigma)
    return (-1) ** (b - 1) * math.factorial(b - 1)


def restrict(pi: SetPartition, T: Iterable[int]) -> SetPartition:
    """Restrict ``pi`` to the contiguous interval ``T`` and re-index to [|T|]."""
    T = list(T)
    if T and T != list(range(T[0], T[0] + len(T))):
        raise ValueError(f"{T} is not a contiguous interval")
    if T and (T[0] < 1 or T[-1] > pi.k):
        raise ValueError(f"{T} is not inside [1, {pi.k}]")
    lo = T[0] if T else 1
    hi = lo + len(T)
    blocks = [tuple(x - lo + 1 for x in b if lo <= x < hi) for b in pi.blocks]
    return SetPartition(len(T), tuple(b for b in blocks if b))


def one_partition(k: int) -> SetPartition:
    """The top element 1_k."""
    return SetPartition(k, (tuple(range(1, k + 1)),) if k else ())


def singletons(k: int) -> SetPartition:
    """The bottom element, all blocks of size one."""
    return SetPartition(k, tuple((i,) for i in range(1, k + 1)))
