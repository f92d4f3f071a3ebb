"""The orthomodular poset of factor pairs of a finite set.

A factor pair ``(θ1, θ2)`` splits the ground set as a product of its two
quotients.  Complement swaps the pair, ``x ⊥ y`` holds iff ``θ1 ⊆ ψ2``,
``ψ1 ⊆ θ2`` and ``θ1`` permutes with ``ψ1``, and ``x ≤ y`` iff ``x ⊥ y′``.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .canon import Certificate, certify
from .counting import is_prime, prime_factors
from .partition_core import (
    GroundSet,
    Partition,
    _size,
    _transversal_masks,
    enumerate_companions,
    enumerate_regular,
    is_factor_tuple,
    meet_all,
    permutes,
)
from .poset import AxiomReport, OrthoPoset, count_orthocomplementations, pair_poset, verify_omp_axioms

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FactorPair:
    first: Partition
    second: Partition

    @property
    def size(self) -> int:
        return self.first.size

    def complement(self) -> FactorPair:
        return FactorPair(self.second, self.first)

    def is_valid(self) -> bool:
        return is_factor_tuple([self.first, self.second])

    def sort_key(self) -> tuple:
        return (self.first.sort_key(), self.second.sort_key())

    def __lt__(self, other: FactorPair) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.first} / {self.second}"


def make_factor_pair(first: Partition, second: Partition) -> FactorPair:
    x = FactorPair(first, second)
    if not x.is_valid():
        raise ValueError(f"not a factor pair: {x}")
    return x


def bottom(size: int) -> FactorPair:
    return FactorPair(Partition.identity(size), Partition.total(size))


def top(size: int) -> FactorPair:
    return FactorPair(Partition.total(size), Partition.identity(size))


def orthocomplement(x: FactorPair) -> FactorPair:
    return x.complement()


def orthogonal(x: FactorPair, y: FactorPair) -> bool:
    return x.first.refines(y.second) and y.first.refines(x.second) and permutes(x.first, y.first)


def leq(x: FactorPair, y: FactorPair) -> bool:
    return orthogonal(x, y.complement())


def is_atom(x: FactorPair) -> bool:
    sizes = set(x.first.sizes())
    return len(sizes) == 1 and is_prime(sizes.pop())


def enumerate_factor_pairs(ground: GroundSet | int, blocks: int) -> Iterator[FactorPair]:
    """Factor pairs whose first part has ``blocks`` blocks."""
    n = _size(ground)
    for first in enumerate_regular(n, blocks, n // blocks):
        for second in enumerate_companions(first):
            yield FactorPair(first, second)


def enumerate_atoms(ground: GroundSet | int) -> Iterator[FactorPair]:
    n = _size(ground)
    primes = sorted({p for p in prime_factors(n) if p < n})
    if not primes:
        log.info("ground size %d is prime or 1: the OMP has only its two bounds", n)
    for p in primes:
        yield from enumerate_factor_pairs(n, n // p)


def _factor_tuples(size: int, counts: Sequence[int]) -> Iterator[tuple[Partition, ...]]:
    """Factor tuples with the given block counts, equal-count parts strictly increasing."""
    full = (1 << size) - 1

    def rec(i: int, cells: list[int], chosen: tuple[Partition, ...]) -> Iterator[tuple[Partition, ...]]:
        if i == len(counts):
            yield chosen
            return
        take = cells[0].bit_count() // counts[i]
        for blocks in _transversal_masks(cells, take):
            part = Partition(size, blocks)
            if i and counts[i] == counts[i - 1] and not chosen[-1] < part:
                continue
            new_cells = [c & b for c in cells for b in blocks]
            yield from rec(i + 1, new_cells, chosen + (part,))

    yield from rec(0, [full], ())


def enumerate_blocks(ground: GroundSet | int) -> Iterator[tuple[Partition, ...]]:
    """Unordered factor tuples with prime block counts, each listed once."""
    n = _size(ground)
    counts = prime_factors(n)
    if len(counts) < 2:
        log.info("ground size %d is prime or 1: the OMP has no proper blocks", n)
        return
    yield from _factor_tuples(n, counts)


def atoms_of_block(parts: Sequence[Partition]) -> list[FactorPair]:
    if len(parts) < 2 or not is_factor_tuple(parts):
        raise ValueError("not a factor tuple")
    out = []
    for i, part in enumerate(parts):
        others = [q for j, q in enumerate(parts) if j != i]
        out.append(FactorPair(meet_all(others), part))
    return out


@dataclass
class OmpStructure:
    """Atoms, blocks and (optionally) the full element list of a finite OMP.

    ``blocks`` hold atom indices.  ``elements``, when present, contains every
    element including the bounds and is what :meth:`poset` orders.
    """

    label: str
    atoms: list
    blocks: list[tuple[int, ...]]
    ground: int | None = None
    elements: list | None = None
    block_tuples: list | None = field(default=None, repr=False)

    @cached_property
    def atom_index(self) -> dict:
        return {a: i for i, a in enumerate(self.atoms)}

    @cached_property
    def atom_blocks(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in self.atoms]
        for j, blk in enumerate(self.blocks):
            for a in blk:
                inc[a].append(j)
        return inc

    @cached_property
    def poset(self) -> OrthoPoset:
        if self.elements is None:
            raise ValueError(f"{self.label}: element list not materialised")
        first = self.elements[0]
        if isinstance(first, FactorPair):
            return pair_poset(self.elements, lambda u, v: u.refines(v), permutes)
        return pair_poset(self.elements, lambda u, v: u <= v)

    def incidence_counts(self) -> tuple[int, int, set[int]]:
        return len(self.atoms), len(self.blocks), {len(b) for b in self.atom_blocks}


def fact_elements(n: int) -> list[FactorPair]:
    """Every factor pair of an ``n``-set, bounds first."""
    elems = [bottom(n), top(n)] if n > 1 else [bottom(n)]
    for d in range(2, n):
        if n % d == 0:
            elems.extend(enumerate_factor_pairs(n, d))
    return elems


def build_fact(n: int, with_elements: bool = True) -> OmpStructure:
    """Enumerate atoms and blocks of the factor-pair OMP of an ``n``-set."""
    atoms = list(enumerate_atoms(n))
    index = {a: i for i, a in enumerate(atoms)}
    blocks = []
    tuples = []
    for t in enumerate_blocks(n):
        tuples.append(t)
        blocks.append(tuple(sorted(index[a] for a in atoms_of_block(t))))
    elements = fact_elements(n) if with_elements else None
    return OmpStructure(f"Fact({n})", atoms, blocks, ground=n, elements=elements, block_tuples=tuples)


def fact_mo_structure(n: int) -> OmpStructure:
    """Atoms/blocks of the factor-pair OMP of a product of two primes, without the order matrix."""
    if len(prime_factors(n)) != 2:
        raise ValueError("size must be a product of two primes")
    return build_fact(n, with_elements=False)


def recognize_mo_n(s: OmpStructure) -> int | None:
    """Return ``k`` if the structure is the horizontal sum of ``k`` four-element Boolean algebras.

    That is: every block holds two atoms that are each other's complement,
    every atom lies in exactly one block, and when the element list is known it
    consists of the atoms and the two bounds, with distinct atoms pairwise
    incomparable.
    """
    for blk in s.blocks:
        if len(blk) != 2:
            return None
        a, b = blk
        if s.atoms[a].complement() != s.atoms[b]:
            return None
    if any(len(bs) != 1 for bs in s.atom_blocks):
        return None
    if s.elements is not None:
        if len(s.elements) != len(s.atoms) + 2 or set(s.elements[2:]) != set(s.atoms):
            return None
        if not _middle_antichain(s.atoms):
            return None
    return len(s.blocks)


def _middle_antichain(atoms: Sequence[FactorPair]) -> bool:
    # x <= y needs first(x) to refine first(y).  Two atoms with equal first
    # parts have seconds with equal block counts, and refinement between
    # partitions with equal block counts is equality, so only pairs of
    # groups whose first parts properly refine need the full test.
    by_first = defaultdict(list)
    for a in atoms:
        by_first[a.first].append(a)
    firsts = list(by_first)
    for p, q in itertools.permutations(firsts, 2):
        if len(p) > len(q) and p.refines(q):
            if any(leq(x, y) for x in by_first[p] for y in by_first[q]):
                return False
    return True


@dataclass
class Component:
    atoms: list[int]
    blocks: list[int]
    incidence: tuple[int, tuple[tuple[int, ...], ...]] = field(repr=False)

    @cached_property
    def certificate(self) -> Certificate:
        return certify(*self.incidence)


@dataclass
class HorizontalSum:
    components: list[Component]

    @property
    def all_isomorphic(self) -> bool:
        """Compare canonical codes; a single component needs no certificate."""
        if len(self.components) <= 1:
            return True
        return len({c.certificate.code for c in self.components}) == 1

    def isomorphism_classes(self) -> list[list[int]]:
        classes: dict = defaultdict(list)
        for i, c in enumerate(self.components):
            classes[c.certificate.code].append(i)
        return list(classes.values())


def sub_incidence(s: OmpStructure, atom_ids: Sequence[int]) -> tuple[int, list[tuple[int, ...]], list[int]]:
    local = {a: i for i, a in enumerate(atom_ids)}
    blk_ids = sorted({j for a in atom_ids for j in s.atom_blocks[a]})
    return len(atom_ids), [tuple(local[a] for a in s.blocks[j]) for j in blk_ids], blk_ids


def horizontal_sum_decomposition(s: OmpStructure) -> HorizontalSum:
    """Split atoms into classes connected through shared blocks and certify each class."""
    parent = list(range(len(s.atoms)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for blk in s.blocks:
        r = find(blk[0])
        for a in blk[1:]:
            parent[find(a)] = r
    groups: dict[int, list[int]] = defaultdict(list)
    for a in range(len(s.atoms)):
        groups[find(a)].append(a)
    comps = []
    for atom_ids in sorted(groups.values()):
        natoms, blks, blk_ids = sub_incidence(s, atom_ids)
        comps.append(Component(atom_ids, blk_ids, (natoms, tuple(blks))))
    return HorizontalSum(comps)


def subalgebra_from_linear_structure(labeling: Sequence[Sequence[int]], p: int, k: int) -> OmpStructure:
    """The factor pairs induced by complementary subspaces of ``GF(p)^k``.

    ``labeling[x]`` is the coordinate vector of point ``x``.
    """
    from .vecfact import coset_embedding, fact_v_structure

    if len(labeling) != p**k:
        raise ValueError(f"expected {p**k} points, got {len(labeling)}")
    v = fact_v_structure(p, k)
    emb = coset_embedding(p, k, labeling)
    atoms = [emb(a) for a in v.atoms]
    elements = [emb(e) for e in v.elements] if v.elements is not None else None
    return OmpStructure(f"Lin({p}^{k})", atoms, list(v.blocks), ground=p**k, elements=elements)


def enumerate_orthocomplementations(s: OmpStructure | OrthoPoset, size_cap: int = 200) -> int:
    poset = s if isinstance(s, OrthoPoset) else s.poset
    if poset.size > size_cap:
        raise ValueError(f"{poset.size} elements exceeds the search cap {size_cap}")
    return count_orthocomplementations(poset)


def verify_omp(s: OmpStructure) -> AxiomReport:
    if s.elements is None:
        raise ValueError(f"{s.label}: element list not materialised")
    present = set(s.elements)
    if any(e.complement() not in present for e in s.elements):
        raise ValueError("element list is not closed under complement")
    return verify_omp_axioms(s.poset)


def blocks_of_atom_count(s: OmpStructure) -> list[int]:
    return [len(b) for b in s.atom_blocks]


def block_boolean_check(s: OmpStructure, block: int) -> bool:
    """Atoms of the block are pairwise orthogonal and all pairwise joins exist."""
    P = s.poset
    pos = {e: i for i, e in enumerate(s.elements)}
    ids = [pos[s.atoms[a]] for a in s.blocks[block]]
    for i, j in itertools.combinations(ids, 2):
        if not P.orthogonal(i, j) or P.join(i, j) is None:
            return False
    return True


def order_matrix_ok(s: OmpStructure) -> bool:
    """Cross-check the indexed order matrix against direct ``leq`` calls on a sample."""
    P = s.poset
    rng = np.random.default_rng(0)
    n = len(s.elements)
    for i, j in rng.integers(0, n, size=(500, 2)):
        if P.leq[i, j] != leq(s.elements[i], s.elements[j]):
            return False
    return True
