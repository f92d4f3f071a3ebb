"""Partitions of a small finite ground set, stored as bitmask blocks.

Points are the integers ``0..size-1`` and a block is an ``int`` whose set bits
are its points.  Every :class:`Partition` is kept in canonical form: blocks
are ordered by their least point, so equal partitions compare and hash equal
regardless of how they were built.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

MAX_GROUND = 32


class PartitionError(ValueError):
    """Blocks handed to :func:`make_partition` do not form a partition."""

    def __init__(self, message: str, point: int | None = None):
        super().__init__(message)
        self.point = point


class OverlapError(PartitionError):
    pass


class GapError(PartitionError):
    pass


class GroundMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GroundSet:
    size: int

    def __post_init__(self) -> None:
        if not 1 <= self.size <= MAX_GROUND:
            raise ValueError(f"ground size must lie in 1..{MAX_GROUND}, got {self.size}")

    @property
    def full(self) -> int:
        return (1 << self.size) - 1


def _size(ground: GroundSet | int) -> int:
    if isinstance(ground, GroundSet):
        return ground.size
    GroundSet(ground)
    return ground


def bits(mask: int) -> list[int]:
    """Points of a bitmask in ascending order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(points: Iterable[int]) -> int:
    m = 0
    for x in points:
        m |= 1 << x
    return m


def _lowbit(mask: int) -> int:
    return mask & -mask


class Partition:
    """An immutable set partition in canonical block order."""

    __slots__ = ("size", "blocks", "_labels", "_hash")

    def __init__(self, size: int, blocks: Iterable[int]):
        # trusted constructor: callers guarantee the masks partition the ground
        self.size = size
        self.blocks: tuple[int, ...] = tuple(sorted(blocks, key=_lowbit))
        self._labels: tuple[int, ...] | None = None
        self._hash = hash((size, self.blocks))

    @classmethod
    def identity(cls, size: int) -> Partition:
        return cls(size, (1 << i for i in range(size)))

    @classmethod
    def total(cls, size: int) -> Partition:
        return cls(size, ((1 << size) - 1,))

    @property
    def labels(self) -> tuple[int, ...]:
        """``labels[x]`` is the index of the block containing ``x``."""
        if self._labels is None:
            lab = [0] * self.size
            for i, b in enumerate(self.blocks):
                for x in bits(b):
                    lab[x] = i
            self._labels = tuple(lab)
        return self._labels

    def block_of(self, x: int) -> int:
        return self.blocks[self.labels[x]]

    def __len__(self) -> int:
        return len(self.blocks)

    def sizes(self) -> list[int]:
        return [b.bit_count() for b in self.blocks]

    def point_blocks(self) -> list[list[int]]:
        return [bits(b) for b in self.blocks]

    def refines(self, other: Partition) -> bool:
        """True iff every block of ``self`` sits inside a block of ``other``."""
        _check_same(self, other)
        lab = other.labels
        ob = other.blocks
        return all(b & ob[lab[_lowbit(b).bit_length() - 1]] == b for b in self.blocks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.size == other.size and self.blocks == other.blocks

    def __lt__(self, other: Partition) -> bool:
        return self.sort_key() < other.sort_key()

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(bits(b)) for b in self.blocks)

    def __str__(self) -> str:
        return " | ".join(" ".join(map(str, bits(b))) for b in self.blocks)

    def __repr__(self) -> str:
        return f"Partition({self.size}, '{self}')"


def make_partition(ground: GroundSet | int, blocks: Iterable[Iterable[int]]) -> Partition:
    """Validate ``blocks`` and return the canonical partition they describe."""
    n = _size(ground)
    seen = 0
    masks = []
    for block in blocks:
        m = 0
        for x in block:
            if not 0 <= x < n:
                raise PartitionError(f"point {x} outside ground set of size {n}", x)
            bit = 1 << x
            if seen & bit:
                raise OverlapError(f"point {x} lies in more than one block", x)
            seen |= bit
            m |= bit
        if not m:
            raise PartitionError("empty block")
        masks.append(m)
    missing = ((1 << n) - 1) & ~seen
    if missing:
        x = bits(missing)[0]
        raise GapError(f"point {x} is not covered by any block", x)
    return Partition(n, masks)


def _check_same(p: Partition, q: Partition) -> None:
    if p.size != q.size:
        raise GroundMismatchError(f"ground sizes differ: {p.size} vs {q.size}")


def meet(p: Partition, q: Partition) -> Partition:
    _check_same(p, q)
    out = []
    for a in p.blocks:
        for b in q.blocks:
            c = a & b
            if c:
                out.append(c)
    return Partition(p.size, out)


def meet_all(parts: Sequence[Partition]) -> Partition:
    acc = parts[0]
    for q in parts[1:]:
        acc = meet(acc, q)
    return acc


def join(p: Partition, q: Partition) -> Partition:
    _check_same(p, q)
    parent = list(range(len(p)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    lab = p.labels
    for b in q.blocks:
        pts = bits(b)
        root = find(lab[pts[0]])
        for x in pts[1:]:
            other = find(lab[x])
            if other != root:
                parent[other] = root
    merged: dict[int, int] = {}
    for i, b in enumerate(p.blocks):
        r = find(i)
        merged[r] = merged.get(r, 0) | b
    return Partition(p.size, merged.values())


def _rows(p: Partition, q: Partition) -> list[int]:
    """Bit rows of the relation ``p;q``: row x is the union of q-blocks meeting p(x)."""
    lab_q = q.labels
    qb = q.blocks
    per_block = []
    for a in p.blocks:
        r = 0
        for x in bits(a):
            r |= qb[lab_q[x]]
        per_block.append(r)
    lab_p = p.labels
    return [per_block[lab_p[x]] for x in range(p.size)]


def permutes(p: Partition, q: Partition) -> bool:
    """True iff the relational products ``p;q`` and ``q;p`` coincide."""
    _check_same(p, q)
    return _rows(p, q) == _rows(q, p)


def compose(p: Partition, q: Partition) -> Partition | None:
    """The relation ``p;q`` as a partition, or ``None`` if it is not transitive."""
    _check_same(p, q)
    rows = _rows(p, q)
    for x, r in enumerate(rows):
        for y in bits(r):
            if rows[y] != r:
                return None
    return Partition(p.size, set(rows))


def is_regular(p: Partition) -> bool:
    return len(set(p.sizes())) == 1


def is_factor_tuple(parts: Sequence[Partition]) -> bool:
    """Meet of the parts is the identity and their block counts multiply to the size."""
    if len(parts) < 2:
        raise ValueError("a factor tuple needs at least two parts")
    n = parts[0].size
    prod = 1
    for q in parts:
        _check_same(parts[0], q)
        prod *= len(q)
    return prod == n and len(meet_all(parts)) == n


def _sorted_candidates(cells: list[int], take: int, first: int) -> list[int]:
    """Blocks containing point ``first`` plus ``take`` points from every cell."""
    options = []
    for cell in cells:
        if cell >> first & 1:
            rest = bits(cell & ~(1 << first))
            options.append([mask_of(c) | (1 << first) for c in itertools.combinations(rest, take - 1)])
        else:
            options.append([mask_of(c) for c in itertools.combinations(bits(cell), take)])
    cands = [sum(choice) for choice in itertools.product(*options)]
    cands.sort(key=bits)
    return cands


def _transversal_masks(cells: list[int], take: int) -> Iterator[tuple[int, ...]]:
    """Partitions of the union of ``cells`` into blocks meeting each cell in ``take`` points.

    Blocks come out ordered by least point and the stream is lexicographic.
    """
    remaining = 0
    for c in cells:
        remaining |= c
    if not remaining:
        yield ()
        return
    if all(c.bit_count() == take for c in cells):
        yield (remaining,)
        return
    first = _lowbit(remaining).bit_length() - 1
    for block in _sorted_candidates(cells, take, first):
        for rest in _transversal_masks([c & ~block for c in cells], take):
            yield (block, *rest)


def enumerate_regular(ground: GroundSet | int, m: int, n: int) -> Iterator[Partition]:
    """All partitions into ``m`` blocks of ``n`` points, in lexicographic order."""
    size = _size(ground)
    if m * n != size:
        raise ValueError(f"{m} blocks of {n} do not cover {size} points")
    for blocks in _transversal_masks([(1 << size) - 1], n):
        yield Partition(size, blocks)


def companion_masks(p: Partition) -> Iterator[tuple[int, ...]]:
    """Raw block tuples of the companions of ``p``; cheaper than building partitions."""
    if not is_regular(p):
        raise ValueError("companions are defined for regular partitions only")
    return _transversal_masks(list(p.blocks), 1)


def enumerate_companions(p: Partition) -> Iterator[Partition]:
    """All ``q`` with ``(p, q)`` a factor pair: each q-block picks one point per p-block."""
    for blocks in companion_masks(p):
        yield Partition(p.size, blocks)


def _perfect_matching(adj: list[list[int]], nright: int) -> list[int] | None:
    """Kuhn's augmenting-path matching; returns left -> right or None."""
    match_right = [-1] * nright

    def augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_right[v] < 0 or augment(match_right[v], seen):
                    match_right[v] = u
                    return True
        return False

    for u in range(len(adj)):
        if not augment(u, [False] * nright):
            return None
    match_left = [-1] * len(adj)
    for v, u in enumerate(match_right):
        match_left[u] = v
    return match_left


def common_companion(p: Partition, q: Partition, seed: int | None = None) -> Partition:
    """A partition whose blocks are transversals of both ``p`` and ``q``.

    Each block is read off a perfect matching between the blocks of ``p`` and
    the blocks of ``q`` that still share points; removing the chosen points
    keeps both partitions regular, so Hall's condition keeps holding.
    """
    _check_same(p, q)
    if not (is_regular(p) and is_regular(q)) or len(p) != len(q):
        raise ValueError("common_companion needs regular partitions with equal block counts")
    rng = random.Random(seed) if seed is not None else None
    k = len(p)
    left = list(p.blocks)
    right = list(q.blocks)
    out = []
    while left[0]:
        adj = [[j for j in range(k) if left[i] & right[j]] for i in range(k)]
        if rng is not None:
            for row in adj:
                rng.shuffle(row)
        match = _perfect_matching(adj, k)
        if match is None:  # impossible for valid input
            raise RuntimeError("Hall condition failed")
        block = 0
        for i, j in enumerate(match):
            pts = bits(left[i] & right[j])
            x = rng.choice(pts) if rng is not None else pts[0]
            block |= 1 << x
            left[i] &= ~(1 << x)
            right[j] &= ~(1 << x)
        out.append(block)
    return Partition(p.size, out)


@dataclass(frozen=True)
class ShapeSignature:
    """Block-size multiset as ``((size, count), ...)`` with sizes descending."""

    parts: tuple[tuple[int, int], ...]

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> ShapeSignature:
        c = Counter(sizes)
        return cls(tuple(sorted(c.items(), reverse=True)))

    @classmethod
    def parse(cls, text: str) -> ShapeSignature:
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"bad shape text {text!r}")
        parts = []
        for item in body[1:-1].split(","):
            count, size = item.strip().split("-")
            parts.append((int(size), int(count)))
        return cls(tuple(sorted(parts, reverse=True)))

    @property
    def total(self) -> int:
        return sum(s * c for s, c in self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(f"{c}-{s}" for s, c in self.parts) + ")"


def shape(p: Partition) -> ShapeSignature:
    return ShapeSignature.from_sizes(p.sizes())


@lru_cache(maxsize=None)
def _group_count(counts: tuple[tuple[int, int], ...], groups: int, target: int) -> int:
    # counts: ((size, multiplicity), ...) of labelled blocks still to be grouped
    if groups == 0:
        return int(not counts)
    size0 = counts[0][0]
    sizes = [s for s, _ in counts]
    avail = [c for _, c in counts]
    total = 0
    # the group that holds one fixed block of size0; choose how many of each size join it
    avail[0] -= 1

    def rec(i: int, remaining: int, ways: int, used: list[int]) -> None:
        nonlocal total
        if i == len(sizes):
            if remaining == 0:
                left = [(s, a - u) for s, a, u in zip(sizes, avail, used)]
                rest = tuple((s, c) for s, c in left if c)
                total += ways * _group_count(rest, groups - 1, target)
            return
        s = sizes[i]
        for u in range(min(avail[i], remaining // s) + 1):
            used.append(u)
            rec(i + 1, remaining - u * s, ways * comb(avail[i], u), used)
            used.pop()

    rec(0, target - size0, 1, [])
    return total


def count_equal_coarsenings(p: Partition, r: int) -> int:
    """Number of ``r``-block partitions with equal block sizes that ``p`` refines."""
    if p.size % r:
        raise ValueError(f"{p.size} points do not split into {r} equal blocks")
    target = p.size // r
    counts = tuple(sorted(Counter(p.sizes()).items(), reverse=True))
    return _group_count(counts, r, target)
