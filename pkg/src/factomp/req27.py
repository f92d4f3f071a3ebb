"""Regular relations on 27 points: common upper bounds, collapses, and the
passage from poset automorphisms to point permutations through 3-subsets."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Iterable

from .autom import Perm, apply_mask, apply_partition, is_perm
from .partition_core import Partition, ShapeSignature, bits, count_equal_coarsenings, join, mask_of, shape
from .slab27 import N, AutomorphismOracle, is_small, phi_req

FULL = (1 << N) - 1

UPPER_BOUND_TABLE: dict[str, int] = {
    "(9-3)": 280,
    "(1-6,7-3)": 70,
    "(1-9,6-3)": 10,
    "(2-6,5-3)": 20,
    "(3-6,3-3)": 6,
    "(4-6,1-3)": 0,
    "(1-9,1-6,4-3)": 4,
    "(1-9,2-6,2-3)": 2,
    "(1-9,3-6)": 0,
    "(2-9,3-3)": 1,
    "(2-9,1-6,1-3)": 1,
    "(3-9)": 1,
}


class CollapseError(ValueError):
    pass


class NotSpecial(ValueError):
    """A block map failed a condition every special permutation satisfies."""


class LambdaError(RuntimeError):
    pass


# ---------------------------------------------------------------- upper bounds


def large_upper_bound_count(a: Partition, b: Partition) -> tuple[ShapeSignature, int]:
    """Shape of ``a ∨ b`` and the number of large relations above both."""
    if not (is_small(a) and is_small(b)):
        raise ValueError("both relations must be small")
    j = join(a, b)
    return shape(j), count_equal_coarsenings(j, 3)


def template_pair(sig: ShapeSignature | str, rng: random.Random) -> tuple[Partition, Partition]:
    """Small ``a, b`` whose join has the given shape.

    Blocks of ``a`` are grouped in threes (one join block of 9), pairs (6) and
    singles (3).  ``b`` is a random transversal of each triple group, a random
    connected re-split of each pair group, and equal to ``a`` on singles.
    Points are relabelled at random.
    """
    if isinstance(sig, str):
        sig = ShapeSignature.parse(sig)
    counts = dict((s, c) for s, c in sig.parts)
    c9, c6, c3 = counts.get(9, 0), counts.get(6, 0), counts.get(3, 0)
    if 9 * c9 + 6 * c6 + 3 * c3 != N or set(counts) - {3, 6, 9}:
        raise ValueError(f"{sig} is not a join shape of two small relations")
    pts = list(range(N))
    rng.shuffle(pts)
    rows = [pts[3 * i : 3 * i + 3] for i in range(9)]
    a_blocks = [mask_of(r) for r in rows]
    b_blocks = []
    i = 0
    for _ in range(c9):
        group = [r[:] for r in rows[i : i + 3]]
        for r in group:
            rng.shuffle(r)
        b_blocks.extend(mask_of(r[c] for r in group) for c in range(3))
        i += 3
    for _ in range(c6):
        six = rows[i] + rows[i + 1]
        rng.shuffle(six)
        if mask_of(six[:3]) in a_blocks:
            six[2], six[3] = six[3], six[2]
        blk = mask_of(six[:3])
        b_blocks.extend([blk, mask_of(six) ^ blk])
        i += 2
    b_blocks.extend(a_blocks[i:])
    a, b = Partition(N, a_blocks), Partition(N, b_blocks)
    if shape(join(a, b)) != sig:
        raise AssertionError("template join has the wrong shape")
    return a, b


# ---------------------------------------------------------------- collapses


@dataclass(frozen=True)
class Collapse:
    members: tuple[Partition, ...]
    fused: int

    def __contains__(self, a: Partition) -> bool:
        return a in self.members


@dataclass(frozen=True)
class CollapseFailure:
    reason: str
    pair: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return False


def collapse_of(a: Partition, i: int, j: int) -> Collapse:
    """All small relations keeping every block of ``a`` except blocks ``i`` and ``j``."""
    if not is_small(a):
        raise CollapseError("not a small relation")
    if i == j or not (0 <= i < 9 and 0 <= j < 9):
        raise CollapseError(f"bad block indices {i}, {j}")
    fused = a.blocks[i] | a.blocks[j]
    keep = [blk for k, blk in enumerate(a.blocks) if k not in (i, j)]
    pts = bits(fused)
    members = []
    for rest in itertools.combinations(pts[1:], 2):
        blk = mask_of((pts[0],) + rest)
        members.append(Partition(N, keep + [blk, fused ^ blk]))
    return Collapse(tuple(sorted(members)), fused)


def recognize_collapse(rels: Iterable[Partition]) -> Collapse | CollapseFailure:
    ms = sorted(set(rels))
    if len(ms) != 10:
        return CollapseFailure(f"{len(ms)} distinct relations, not 10")
    if not all(is_small(m) for m in ms):
        return CollapseFailure("a member is not small")
    fused = None
    for i, j in itertools.combinations(range(10), 2):
        sig, count = large_upper_bound_count(ms[i], ms[j])
        if count != 70:
            return CollapseFailure(f"{count} common large upper bounds", (i, j))
        six = next(blk for blk in join(ms[i], ms[j]).blocks if blk.bit_count() == 6)
        if fused is None:
            fused = six
        elif six != fused:
            return CollapseFailure("fused pair depends on the chosen members", (i, j))
    shared = set(ms[0].blocks)
    for m in ms[1:]:
        shared &= set(m.blocks)
    if len(shared) != 7:
        return CollapseFailure(f"members share {len(shared)} blocks, not 7")
    return Collapse(tuple(ms), fused)


def collapses_containing(a: Partition) -> list[Collapse]:
    return [collapse_of(a, i, j) for i, j in itertools.combinations(range(9), 2)]


def share_a_block(X: Collapse, Y: Collapse) -> bool:
    """Overlapping, with no two members of the union having exactly 20 common large upper bounds."""
    if not set(X.members) & set(Y.members):
        return False
    union = sorted(set(X.members) | set(Y.members))
    return all(large_upper_bound_count(b, c)[1] != 20 for b, c in itertools.combinations(union, 2))


def neighbours(b: Partition, c: Partition) -> bool:
    """Both lie in one collapse: they share at least 7 blocks."""
    return len(set(b.blocks) & set(c.blocks)) >= 7


# ---------------------------------------------------------------- small blocks


def small_blocks() -> list[int]:
    return [mask_of(t) for t in itertools.combinations(range(N), 3)]


def xalpha_size() -> int:
    """Number of small relations having a fixed 3-subset as a block."""
    return factorial(24) // (factorial(8) * factorial(3) ** 8)


def xalpha_contains(alpha: int, a: Partition) -> bool:
    return alpha in a.blocks


@dataclass
class XalphaReport:
    inside: int
    only_a: int
    sharing: bool
    witnesses: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.inside == 28 and self.only_a == 8 and self.sharing and not self.failures


def check_xalpha_conditions(alpha: int, a: Partition, rng: random.Random, samples: int = 4) -> XalphaReport:
    """Check the four local conditions characterising ``𝔛_α`` at the member ``a``."""
    if not xalpha_contains(alpha, a):
        raise ValueError("alpha is not a block of a")
    cols = collapses_containing(a)
    inside = [X for X in cols if all(xalpha_contains(alpha, m) for m in X.members)]
    only_a = [X for X in cols if [m for m in X.members if xalpha_contains(alpha, m)] == [a]]
    sharing = all(share_a_block(X, Y) for X, Y in itertools.combinations(only_a, 2))
    rep = XalphaReport(len(inside), len(only_a), sharing, 0)
    k = a.blocks.index(alpha)
    others = [i for i in range(9) if i != k]
    for t in range(samples):
        i, j, m, n = rng.sample(others, 4)
        b = rng.choice([x for x in collapse_of(a, i, j).members if x != a])
        c = rng.choice([x for x in collapse_of(a, m, n).members if x != a])
        if large_upper_bound_count(b, c)[1] != 20:
            rep.failures.append(f"sample {t}: the pair does not have 20 common upper bounds")
            continue
        u1 = a.blocks[i] | a.blocks[j]
        u2 = a.blocks[m] | a.blocks[n]
        d_blocks = [x for x in b.blocks if x & u1] + [x for x in c.blocks if x & u2]
        d_blocks += [x for x in a.blocks if not x & (u1 | u2)]
        d = Partition(N, d_blocks)
        if d == a or not xalpha_contains(alpha, d) or not (neighbours(b, d) and neighbours(c, d)):
            rep.failures.append(f"sample {t}: witness d fails")
            continue
        rep.witnesses += 1
    return rep


# ---------------------------------------------------------------- block permutations


class BlockPermutation:
    """A bijection on the 3-subsets of the 27 points."""

    def __init__(self, mapping: dict[int, int]):
        keys = set(small_blocks())
        if set(mapping) != keys or set(mapping.values()) != keys:
            raise ValueError("mapping is not a bijection on the 3-subsets")
        self.mapping = dict(mapping)

    def __call__(self, alpha: int) -> int:
        return self.mapping[alpha]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BlockPermutation) and self.mapping == other.mapping

    @classmethod
    def identity(cls) -> BlockPermutation:
        return cls({b: b for b in small_blocks()})

    @classmethod
    def from_point_perm(cls, alpha: Perm) -> BlockPermutation:
        return cls({b: apply_mask(alpha, b) for b in small_blocks()})

    def compose(self, other: BlockPermutation) -> BlockPermutation:
        """``self ∘ other``."""
        return BlockPermutation({b: self.mapping[v] for b, v in other.mapping.items()})

    def inverse(self) -> BlockPermutation:
        return BlockPermutation({v: b for b, v in self.mapping.items()})

    def special_violations(self, samples: int, rng: random.Random) -> list[tuple[int, int, int]]:
        """Sampled triples breaking intersection sizes or union containment.

        Half the samples draw ``γ`` from inside ``α ∪ β`` so that the
        containment clause is exercised in both directions.
        """
        blocks = list(self.mapping)
        bad = []
        for t in range(samples):
            x, y = rng.sample(blocks, 2)
            if t % 2:
                u = bits(x | y)
                z = mask_of(rng.sample(u, 3))
            else:
                z = rng.choice(blocks)
            rx, ry, rz = self.mapping[x], self.mapping[y], self.mapping[z]
            if (x & y).bit_count() != (rx & ry).bit_count() or ((z & ~(x | y)) == 0) != ((rz & ~(rx | ry)) == 0):
                bad.append((x, y, z))
        return bad

    def is_special(self, samples: int = 10_000, rng: random.Random | None = None) -> bool:
        return not self.special_violations(samples, rng or random.Random(0))

    def is_special_exhaustive(self) -> bool:
        """Check every pair; slow (about 4·10⁶ pairs).

        For a bijection preserving intersection sizes, the subsets of
        ``α ∪ β`` and of ``ρα ∪ ρβ`` are equally many, so checking that the
        former land in the latter gives the converse too.
        """
        m = self.mapping
        blocks = list(m)
        for x, y in itertools.combinations(blocks, 2):
            rx, ry = m[x], m[y]
            if (x & y).bit_count() != (rx & ry).bit_count():
                return False
            ru = rx | ry
            for z in itertools.combinations(bits(x | y), 3):
                if m[mask_of(z)] & ~ru:
                    return False
        return True


def _members_sharing_only(alpha: int) -> tuple[Partition, Partition]:
    rest = bits(FULL ^ alpha)
    one = [alpha] + [mask_of(rest[i : i + 3]) for i in range(0, 24, 3)]
    two = [alpha] + [mask_of(rest[(i + k) % 24] for k in (1, 2, 3)) for i in range(0, 24, 3)]
    return Partition(N, one), Partition(N, two)


def _random_member(alpha: int, rng: random.Random) -> Partition:
    rest = bits(FULL ^ alpha)
    rng.shuffle(rest)
    return Partition(N, [alpha] + [mask_of(rest[i : i + 3]) for i in range(0, 24, 3)])


def lambda_to_block_permutation(
    lam: Callable[[Partition], Partition],
    budget: int = 64,
    seed: int = 0,
    special_samples: int = 10_000,
) -> BlockPermutation:
    """The block map ``α ↦ β`` with ``Λ[𝔛_α] = 𝔛_β``.

    ``β`` is the only block common to the images of sampled members of
    ``𝔛_α``.  Sampling starts from two members sharing only ``α`` and doubles
    while more than one common block remains.
    """
    rng = random.Random(seed)
    out = {}
    for alpha in small_blocks():
        common: set[int] | None = None
        for m in _members_sharing_only(alpha):
            img = set(lam(m).blocks)
            common = img if common is None else common & img
        size = 2
        while len(common) > 1 and size < budget:
            for _ in range(size):
                common &= set(lam(_random_member(alpha, rng)).blocks)
            size *= 2
        if len(common) != 1:
            raise LambdaError(f"images of members of the family of {bits(alpha)} share {len(common)} blocks")
        out[alpha] = common.pop()
    try:
        rho = BlockPermutation(out)
    except ValueError as e:
        raise LambdaError(str(e)) from e
    if special_samples and not rho.is_special(special_samples, rng):
        raise LambdaError("induced block map is not special")
    return rho


def block_permutation_to_point(rho: BlockPermutation) -> Perm:
    """The point map ``p ↦ x`` with ``ρ(α) ∩ ρ(β) = {x}`` whenever ``α ∩ β = {p}``."""
    m = rho.mapping
    out = []
    for p in range(N):
        o = [q for q in range(N) if q != p]
        images = []
        for w in (0, 4):
            x = m[mask_of((p, o[w], o[w + 1]))] & m[mask_of((p, o[w + 2], o[w + 3]))]
            if x.bit_count() != 1:
                raise NotSpecial(f"witness blocks for point {p} do not meet in one point")
            images.append(x)
        if images[0] != images[1]:
            raise NotSpecial(f"two witness pairs for point {p} disagree")
        x = images[0]
        for q, r in itertools.combinations(o, 2):
            if not m[mask_of((p, q, r))] & x:
                raise NotSpecial(f"a block through {p} misses the image point")
        out.append(bits(x)[0])
    perm = tuple(out)
    if not is_perm(perm):
        raise NotSpecial("point map is not a bijection")
    return perm


def end_to_end_roundtrip(
    alpha: Perm,
    checks: int = 0,
    probes: int = 64,
    seed: int = 0,
    timings: dict[str, float] | None = None,
) -> Perm:
    """Recover ``α`` from the atom map it induces, via relations and 3-subsets."""
    if len(alpha) != N or not is_perm(alpha):
        raise ValueError("need a permutation of 27 points")
    t0 = time.perf_counter()
    oracle = AutomorphismOracle.from_permutation(alpha, probes=probes, seed=seed)
    lam = phi_req(oracle, checks)
    rho = lambda_to_block_permutation(lam, seed=seed)
    t1 = time.perf_counter()
    out = block_permutation_to_point(rho)
    t2 = time.perf_counter()
    if timings is not None:
        timings["block_map"] = t1 - t0
        timings["point_map"] = t2 - t1
    return out


def action_on_req(alpha: Perm) -> Callable[[Partition], Partition]:
    return lambda x: apply_partition(alpha, x)


def line_three_cycle() -> Perm:
    """A 3-cycle on the points ``0, 1, 2``."""
    p = list(range(N))
    p[0], p[1], p[2] = 1, 2, 0
    return tuple(p)

