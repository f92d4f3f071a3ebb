"""Local structure of the factor-pair OMP on 27 points.

A small relation has 9 blocks of 3 and a large relation has 3 blocks of 9.
Atoms are pairs ``aA`` with ``a`` small and ``A`` large.  An atom is drawn as
a 9×3 array: row ``r`` holds the block ``a[r]`` and column ``c`` holds the
block ``A[c]``, so every cell is a single point.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .autom import Perm, gamma_apply, inverse
from .fact_omp import FactorPair, atoms_of_block, is_atom, orthogonal
from .partition_core import (
    Partition,
    ShapeSignature,
    bits,
    compose,
    mask_of,
    meet,
    meet_all,
    permutes,
    shape,
)

N = 27
Grid = list[list[int]]

SMALL = ShapeSignature.parse("(9-3)")
LARGE = ShapeSignature.parse("(3-9)")
NEAR_FIRST_SHAPE = ShapeSignature.parse("(1-9,2-6,2-3)")

# Row-sets switched between two columns to move one point of row 1 across;
# rows are numbered 1..9 with row 1 the row being changed.
FIRST_SPOT_SWITCHES = ((7, 8, 9), (4, 5, 6), (1, 2, 7), (5, 6, 8), (2, 4, 9))
# Row pairs whose entries in one column are exchanged, per step, to exchange
# the entries of rows 1 and 2 in that column.
SECOND_SPOT_SWAPS = (((2, 3), (6, 7), (8, 9)), ((2, 3), (4, 5), (6, 7)), ((1, 2), (4, 5), (8, 9)))


class SlabError(ValueError):
    pass


class NotASlab(SlabError):
    pass


class OracleError(RuntimeError):
    """The black-box map failed a check that every automorphism passes."""


def is_small(p: Partition) -> bool:
    return p.size == N and shape(p) == SMALL


def is_large(p: Partition) -> bool:
    return p.size == N and shape(p) == LARGE


def _require_small(*parts: Partition) -> None:
    for p in parts:
        if not is_small(p):
            raise SlabError(f"not a small relation: {p}")


def is_trivial(p: Partition) -> bool:
    return len(p) == p.size


def orthogonal_triple(a: Partition, b: Partition, c: Partition) -> bool:
    """Pairwise permuting, and each relation meets the composite of the other two trivially."""
    for x, y, z in ((a, b, c), (b, a, c), (c, a, b)):
        if not permutes(y, z):
            return False
        yz = compose(y, z)
        if yz is None or not is_trivial(meet(x, yz)):
            return False
    return True


# ---------------------------------------------------------------- arrays


def grid_of(x: FactorPair) -> Grid:
    """``grid[r][c]`` is the point in row block ``r`` of the first spot and column block ``c`` of the second."""
    A = x.second
    return [[p for p in sorted(bits(row), key=lambda p: A.labels[p])] for row in x.first.blocks]


def from_grid(grid: Grid) -> FactorPair:
    rows = [mask_of(r) for r in grid]
    cols = [mask_of(r[c] for r in grid) for c in range(len(grid[0]))]
    return FactorPair(Partition(N, rows), Partition(N, cols))


def canonical_companion(a: Partition) -> Partition:
    """Column ``c`` takes the ``c``-th smallest point of each block."""
    k = a.blocks[0].bit_count()
    pts = a.point_blocks()
    return Partition(a.size, (mask_of(b[c] for b in pts) for c in range(k)))


def canonical_refinement(A: Partition) -> Partition:
    """Row ``r`` takes the ``r``-th smallest point of each block."""
    return canonical_companion(A)


def random_small(rng: random.Random) -> Partition:
    pts = list(range(N))
    rng.shuffle(pts)
    return Partition(N, (mask_of(pts[i : i + 3]) for i in range(0, N, 3)))


def random_large(rng: random.Random) -> Partition:
    pts = list(range(N))
    rng.shuffle(pts)
    return Partition(N, (mask_of(pts[i : i + 9]) for i in range(0, N, 9)))


def random_companion(a: Partition, rng: random.Random) -> Partition:
    rows = a.point_blocks()
    for r in rows:
        rng.shuffle(r)
    k = len(rows[0])
    return Partition(a.size, (mask_of(r[c] for r in rows) for c in range(k)))


def random_atom(rng: random.Random) -> FactorPair:
    a = random_small(rng)
    return FactorPair(a, random_companion(a, rng))


def random_small_below(A: Partition, rng: random.Random) -> Partition:
    out = []
    for blk in A.point_blocks():
        rng.shuffle(blk)
        out.extend(mask_of(blk[i : i + 3]) for i in range(0, len(blk), 3))
    return Partition(A.size, out)


def random_orthogonal_partner(a: Partition, rng: random.Random) -> Partition:
    """A small ``b`` permuting with ``a`` with trivial meet: transversals inside random triples of ``a``-blocks."""
    idx = list(range(len(a)))
    rng.shuffle(idx)
    rows = a.point_blocks()
    out = []
    for g in range(0, len(idx), 3):
        group = [rows[i][:] for i in idx[g : g + 3]]
        for r in group[1:]:
            rng.shuffle(r)
        out.extend(mask_of(r[c] for r in group) for c in range(3))
    return Partition(a.size, out)


# ---------------------------------------------------------------- slabs


@dataclass(frozen=True)
class Slab:
    """``X`` side: atoms ``aA`` with ``b ⊆ A``.  ``Y`` side: atoms ``bB`` with ``a ⊆ B``."""

    kind: str
    a: Partition
    b: Partition
    atoms: tuple[FactorPair, ...]

    @property
    def first_spot(self) -> Partition:
        return self.a if self.kind == "X" else self.b

    @property
    def second_meet(self) -> Partition:
        return self.b if self.kind == "X" else self.a

    def second_spots(self) -> list[Partition]:
        return [x.second for x in self.atoms]


def _check_pair(a: Partition, b: Partition) -> None:
    _require_small(a, b)
    if not permutes(a, b):
        raise SlabError("the two small relations do not permute")
    if not is_trivial(meet(a, b)):
        raise SlabError("the two small relations do not meet trivially")


def _slab_atoms(first: Partition, inner: Partition) -> list[FactorPair]:
    """Atoms with the given first spot whose second spot contains ``inner``.

    ``first∘inner`` has 3 blocks of 9; inside each, ``inner`` contributes 3
    blocks.  A column takes one ``inner``-block from each of the 3 groups, so
    fixing the first group's order leaves ``3!·3!`` choices.
    """
    C = compose(first, inner)
    groups = [[blk for blk in inner.blocks if blk & big] for big in C.blocks]
    out = []
    for p1 in itertools.permutations(range(3)):
        for p2 in itertools.permutations(range(3)):
            cols = [groups[0][k] | groups[1][p1[k]] | groups[2][p2[k]] for k in range(3)]
            out.append(FactorPair(first, Partition(N, cols)))
    return sorted(out)


def build_slab(a: Partition, b: Partition, kind: str = "X") -> Slab:
    _check_pair(a, b)
    if kind == "X":
        atoms = _slab_atoms(a, b)
    elif kind == "Y":
        atoms = _slab_atoms(b, a)
    else:
        raise ValueError(f"kind must be 'X' or 'Y', not {kind!r}")
    s = Slab(kind, a, b, tuple(atoms))
    if len(set(atoms)) != 36:
        raise AssertionError(f"slab has {len(set(atoms))} atoms")
    if any(not x.is_valid() for x in atoms):
        raise AssertionError("slab contains a non-factor pair")
    if meet_all(s.second_spots()) != s.second_meet:
        raise AssertionError("meet of second spots is not the expected small relation")
    return s


def slab_orthogonality(X: Slab, Y: Slab) -> bool:
    return all(orthogonal(x, y) for x in X.atoms for y in Y.atoms)


def recover_slab(atoms: Iterable[FactorPair]) -> tuple[Partition, Partition]:
    """The pair ``(a, b)`` with ``atoms = 𝔛(a, b)``."""
    atoms = list(atoms)
    firsts = {x.first for x in atoms}
    if len(atoms) != 36 or len(set(atoms)) != 36:
        raise NotASlab(f"expected 36 distinct atoms, got {len(set(atoms))}")
    if len(firsts) != 1:
        raise NotASlab("atoms do not share a first spot")
    a = firsts.pop()
    b = meet_all([x.second for x in atoms])
    if not is_small(b):
        raise NotASlab(f"meet of second spots has shape {shape(b)}")
    try:
        rebuilt = build_slab(a, b)
    except SlabError as e:
        raise NotASlab(str(e)) from e
    if set(rebuilt.atoms) != set(atoms):
        raise NotASlab("rebuilt slab differs from the input")
    return a, b


@dataclass(frozen=True)
class Triple:
    X: Slab
    Y: Slab
    Z: frozenset[FactorPair]
    witnesses: dict = field(default_factory=dict, compare=False, hash=False)


def build_triple(a: Partition, b: Partition) -> Triple:
    X = build_slab(a, b, "X")
    Y = build_slab(a, b, "Y")
    C = compose(a, b)
    found: dict[FactorPair, tuple[FactorPair, FactorPair]] = {}
    for x in X.atoms:
        for y in Y.atoms:
            c = meet(x.second, y.second)
            if not is_small(c):
                continue
            z = FactorPair(c, C)
            if z not in found and orthogonal_triple(a, b, c):
                found[z] = (x, y)
    return Triple(X, Y, frozenset(found), found)


def build_z(a: Partition, b: Partition) -> frozenset[FactorPair]:
    return build_triple(a, b).Z


def in_z(a: Partition, b: Partition, x: FactorPair) -> bool:
    """Membership in ``𝒵(a, b)`` straight from the definition."""
    C = compose(a, b)
    return C is not None and x.second == C and is_small(x.first) and orthogonal_triple(a, b, x.first)


# ---------------------------------------------------------------- nearness


def near_first(x: FactorPair, y: FactorPair) -> bool:
    if x.first != y.first:
        raise ValueError("atoms have different first spots")
    return shape(meet(x.second, y.second)) == NEAR_FIRST_SHAPE


def _second_swaps(x: FactorPair, y: FactorPair) -> list[tuple[int, int]] | None:
    """Point pairs exchanged between the first spots, or ``None`` if not three swaps in one column."""
    a, b = x.first, y.first
    bset = set(b.blocks)
    changed = [blk for blk in a.blocks if blk not in bset]
    if len(changed) != 6:
        return None
    lost = {}
    for blk in changed:
        # the b-block holding two of this block's points
        hits = [bb for bb in b.blocks if (bb & blk).bit_count() == 2]
        if len(hits) != 1:
            return None
        (p,) = bits(blk & ~hits[0])
        (q,) = bits(hits[0] & ~blk)
        lost[p] = q
    if any(lost.get(q) != p for p, q in lost.items()):
        return None
    if len({x.second.labels[p] for p in lost}) != 1:
        return None
    return sorted((p, q) for p, q in lost.items() if p < q)


def near_second(x: FactorPair, y: FactorPair) -> bool:
    if x.second != y.second:
        raise ValueError("atoms have different second spots")
    return _second_swaps(x, y) is not None


def near_first_witness(x: FactorPair, y: FactorPair) -> Partition:
    """A small ``d`` with both atoms in ``𝔛(a, d)``.

    Each column is cut into three triples of rows: the switched rows, then the
    remaining rows in two batches.
    """
    if not near_first(x, y):
        raise ValueError("atoms are not near")
    grid = grid_of(x)
    B = y.second
    rows = None
    for c in range(3):
        col = [grid[r][c] for r in range(9)]
        target = max(B.blocks, key=lambda blk: (blk & mask_of(col)).bit_count())
        moved = [r for r in range(9) if not target >> grid[r][c] & 1]
        if len(moved) == 3:
            rows = moved
            break
    if rows is None:
        raise AssertionError("no column with three switched rows")
    rest = [r for r in range(9) if r not in rows]
    batches = [rows, rest[:3], rest[3:]]
    d = Partition(N, (mask_of(grid[r][c] for r in batch) for batch in batches for c in range(3)))
    if not (permutes(x.first, d) and is_trivial(meet(x.first, d)) and d.refines(x.second) and d.refines(B)):
        raise AssertionError("witness construction failed")
    return d


def near_second_witness(x: FactorPair, y: FactorPair) -> tuple[Partition, Partition]:
    """Small ``p, q`` with both atoms in ``𝒵(p, q)``.

    Points get coordinates ``(column, u, v)``: the swapped row pairs get
    ``u = 0, 1`` and ``v`` the pair index, the other three rows ``u = 2``.
    ``p`` groups points sharing column and ``v``; ``q`` those sharing column and ``u``.
    """
    swaps = _second_swaps(x, y)
    if swaps is None:
        raise ValueError("atoms are not near")
    grid = grid_of(x)
    row_of = {grid[r][c]: r for r in range(9) for c in range(3)}
    coord: dict[int, tuple[int, int]] = {}
    for t, (p, q) in enumerate(swaps):
        coord[row_of[p]] = (0, t)
        coord[row_of[q]] = (1, t)
    for t, r in enumerate(r for r in range(9) if r not in coord):
        coord[r] = (2, t)
    p_blocks: dict[tuple[int, int], int] = {}
    q_blocks: dict[tuple[int, int], int] = {}
    for r in range(9):
        u, v = coord[r]
        for c in range(3):
            pt = 1 << grid[r][c]
            p_blocks[(c, v)] = p_blocks.get((c, v), 0) | pt
            q_blocks[(c, u)] = q_blocks.get((c, u), 0) | pt
    return Partition(N, p_blocks.values()), Partition(N, q_blocks.values())


# ---------------------------------------------------------------- chains


def _switch_rows(grid: Grid, rows: Iterable[int], i: int, j: int) -> None:
    for r in rows:
        grid[r][i], grid[r][j] = grid[r][j], grid[r][i]


def _swap_in_row(grid: Grid, r: int, i: int, j: int) -> list[FactorPair]:
    order = [r] + [s for s in range(9) if s != r]
    out = []
    for rows in FIRST_SPOT_SWITCHES:
        _switch_rows(grid, (order[k - 1] for k in rows), i, j)
        out.append(from_grid(grid))
    return out


def _swap_in_column(grid: Grid, c: int, r1: int, r2: int) -> list[FactorPair]:
    order = [r1, r2] + [s for s in range(9) if s not in (r1, r2)]
    out = []
    for step in SECOND_SPOT_SWAPS:
        for u, v in step:
            ru, rv = order[u - 1], order[v - 1]
            grid[ru][c], grid[rv][c] = grid[rv][c], grid[ru][c]
        out.append(from_grid(grid))
    return out


def _transpositions(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    cycles = 0
    for i in range(len(perm)):
        if not seen[i]:
            cycles += 1
            while not seen[i]:
                seen[i] = True
                i = perm[i]
    return len(perm) - cycles


def chain_same_first(x: FactorPair, y: FactorPair) -> list[FactorPair]:
    """Atoms ``z1, ..., zt = y``, each near the one before, starting next to ``x``."""
    if x.first != y.first:
        raise ValueError("atoms have different first spots")
    if x == y:
        return []
    grid = grid_of(x)
    B = y.second
    # choose which column each block of B should occupy, minimising swaps
    best = None
    for lab in itertools.permutations(range(3)):
        cost = sum(_transpositions([lab[B.labels[p]] for p in row]) for row in grid)
        if best is None or cost < best[0]:
            best = (cost, lab)
    lab = best[1]
    out: list[FactorPair] = []
    for r in range(9):
        for c in range(3):
            want = next(j for j in range(3) if lab[B.labels[grid[r][j]]] == c)
            if want != c:
                out.extend(_swap_in_row(grid, r, c, want))
    if out[-1] != y:
        raise AssertionError("chain does not end at the target")
    return out


def chain_same_second(x: FactorPair, y: FactorPair) -> list[FactorPair]:
    if x.second != y.second:
        raise ValueError("atoms have different second spots")
    if x == y:
        return []
    grid = grid_of(x)
    b = y.first
    best = None
    for anchor in range(3):
        # b-blocks take the row of their point in the anchor column
        row_of_block = {b.labels[grid[r][anchor]]: r for r in range(9)}
        cost = sum(
            _transpositions([row_of_block[b.labels[grid[r][c]]] for r in range(9)]) for c in range(3) if c != anchor
        )
        if best is None or cost < best[0]:
            best = (cost, row_of_block)
    row_of_block = best[1]
    out: list[FactorPair] = []
    for c in range(3):
        for r in range(9):
            src = next(s for s in range(9) if row_of_block[b.labels[grid[s][c]]] == r)
            if src != r:
                out.extend(_swap_in_column(grid, c, r, src))
    if out[-1] != y:
        raise AssertionError("chain does not end at the target")
    return out


def is_chain(x: FactorPair, chain: Sequence[FactorPair], near: Callable[[FactorPair, FactorPair], bool]) -> bool:
    prev = x
    for z in chain:
        if not near(prev, z):
            return False
        prev = z
    return True


# ---------------------------------------------------------------- automorphism oracles


class AutomorphismOracle:
    """A black-box atom map, promised to extend to an automorphism.

    Images are memoised so the map is pure.  A budget of ``probes`` checks
    compares orthogonality of queried atoms with that of their images: the
    first call spends a quarter of the budget on the pairwise-orthogonal atoms
    of random coordinate blocks, later calls spend one probe each against a
    random earlier query.
    """

    def __init__(
        self,
        fn: Callable[[FactorPair], FactorPair],
        inverse: Callable[[FactorPair], FactorPair] | None = None,
        probes: int = 64,
        seed: int = 0,
    ):
        self.fn = fn
        self.inverse = inverse
        self.probes = probes
        self._rng = random.Random(seed)
        self._memo: dict[FactorPair, FactorPair] = {}
        self._queried: list[FactorPair] = []
        self._started = False

    @classmethod
    def from_permutation(cls, alpha: Perm, **kw) -> AutomorphismOracle:
        beta = inverse(alpha)
        return cls(lambda x: gamma_apply(alpha, x), lambda x: gamma_apply(beta, x), **kw)

    def image(self, x: FactorPair) -> FactorPair:
        y = self._memo.get(x)
        if y is None:
            y = self.fn(x)
            if y.size != x.size or not is_atom(y) or not y.is_valid():
                raise OracleError(f"image of {x} is not an atom")
            self._memo[x] = y
        return y

    def _probe(self, x: FactorPair, z: FactorPair) -> None:
        self.probes -= 1
        if orthogonal(x, z) != orthogonal(self.image(x), self.image(z)):
            raise OracleError(f"orthogonality not preserved for {x} and {z}")

    def validate(self, count: int) -> None:
        """Spend up to ``count`` probes on orthogonal triples from random coordinate blocks."""
        from .states import random_block

        while count > 0 and self.probes > 0:
            trio = atoms_of_block(random_block(N, 3, 3, self._rng))
            for u, v in itertools.combinations(trio, 2):
                self._probe(u, v)
                count -= 1

    def __call__(self, x: FactorPair) -> FactorPair:
        if not self._started:
            self._started = True
            self.validate(self.probes // 4)
        y = self.image(x)
        if self.probes > 0 and self._queried:
            self._probe(x, self._rng.choice(self._queried))
        self._queried.append(x)
        return y

    def then(self, other: AutomorphismOracle) -> AutomorphismOracle:
        """The composite ``other ∘ self``."""
        inv = None
        if self.inverse is not None and other.inverse is not None:
            inv = lambda x: self.inverse(other.inverse(x))  # noqa: E731
        return AutomorphismOracle(lambda x: other(self(x)), inv, probes=0)

    def inverted(self) -> AutomorphismOracle:
        if self.inverse is None:
            raise OracleError("no inverse supplied")
        return AutomorphismOracle(self.inverse, self.fn, probes=0)


def phi_small(phi: AutomorphismOracle, a: Partition, checks: int = 2, rng: random.Random | None = None) -> Partition:
    """First spot of the image of an atom with first spot ``a``.

    ``checks`` extra random companions are tried; they must give the same
    first spot.
    """
    _require_small(a)
    out = phi(FactorPair(a, canonical_companion(a))).first
    rng = rng or random.Random(hash(a))
    for _ in range(checks):
        other = phi(FactorPair(a, random_companion(a, rng))).first
        if other != out:
            raise OracleError(f"atoms with first spot {a} have images with different first spots")
    if not is_small(out):
        raise OracleError("image first spot is not small")
    return out


def phi_large(phi: AutomorphismOracle, A: Partition, checks: int = 2, rng: random.Random | None = None) -> Partition:
    if not is_large(A):
        raise SlabError(f"not a large relation: {A}")
    out = phi(FactorPair(canonical_refinement(A), A)).second
    rng = rng or random.Random(hash(A))
    for _ in range(checks):
        a = random_companion(A, rng)
        other = phi(FactorPair(a, A)).second
        if other != out:
            raise OracleError(f"atoms with second spot {A} have images with different second spots")
    if not is_large(out):
        raise OracleError("image second spot is not large")
    return out


def phi_req(phi: AutomorphismOracle, checks: int = 0) -> Callable[[Partition], Partition]:
    """The induced map on small and large relations."""

    def R(x: Partition) -> Partition:
        if is_small(x):
            return phi_small(phi, x, checks)
        if is_large(x):
            return phi_large(phi, x, checks)
        raise ValueError(f"{x} is neither small nor large")

    return R


def check_order_preservation(R: Callable[[Partition], Partition], samples: int, rng: random.Random) -> list[str]:
    """Sampled checks that ``R`` preserves and reflects ``small ≤ large``.

    For ``a ≤ A`` the pair ``(a, b)`` with ``a∘b = A`` must map to a permuting
    pair whose composite is the image of ``A``.
    """
    fails = []
    for t in range(samples):
        A = random_large(rng)
        a = random_small_below(A, rng)
        b = _partner_inside(a, A, rng)
        Ra, Rb, RA = R(a), R(b), R(A)
        if not Ra.refines(RA):
            fails.append(f"sample {t}: comparable pair not preserved")
        if not permutes(Ra, Rb) or compose(Ra, Rb) != RA:
            fails.append(f"sample {t}: composite of the images is not the image of the composite")
        B = random_large(rng)
        if a.refines(B) != Ra.refines(R(B)):
            fails.append(f"sample {t}: comparability with a random large relation changed")
    return fails


def _partner_inside(a: Partition, A: Partition, rng: random.Random) -> Partition:
    """A small ``b`` with trivial meet with ``a`` and ``a∘b = A``."""
    out = []
    for big in A.blocks:
        rows = [bits(blk) for blk in a.blocks if blk & big]
        for r in rows[1:]:
            rng.shuffle(r)
        out.extend(mask_of(r[c] for r in rows) for c in range(3))
    return Partition(A.size, out)
