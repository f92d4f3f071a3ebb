"""Point permutations acting on factor pairs, and automorphism counts.

A permutation is a tuple ``perm`` with ``perm[x]`` the image of ``x``;
``compose(a, b)`` applies ``b`` first.
"""

from __future__ import annotations

import itertools
import random
from math import factorial
from typing import Sequence

from .fact_omp import FactorPair, OmpStructure, atoms_of_block, horizontal_sum_decomposition
from .partition_core import Partition, bits, is_factor_tuple

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(a: Perm, b: Perm) -> Perm:
    return tuple(a[x] for x in b)


def inverse(a: Perm) -> Perm:
    out = [0] * len(a)
    for x, y in enumerate(a):
        out[y] = x
    return tuple(out)


def random_perm(n: int, rng: random.Random) -> Perm:
    p = list(range(n))
    rng.shuffle(p)
    return tuple(p)


def is_perm(a: Sequence[int]) -> bool:
    return sorted(a) == list(range(len(a)))


def apply_mask(alpha: Perm, mask: int) -> int:
    out = 0
    for x in bits(mask):
        out |= 1 << alpha[x]
    return out


def apply_partition(alpha: Perm, p: Partition) -> Partition:
    if len(alpha) != p.size:
        raise ValueError("permutation and partition live on different ground sets")
    return Partition(p.size, (apply_mask(alpha, b) for b in p.blocks))


def gamma_apply(alpha: Perm, x: FactorPair) -> FactorPair:
    return FactorPair(apply_partition(alpha, x.first), apply_partition(alpha, x.second))


def _preserves(alpha: Perm, blocks: Sequence[Sequence[int]], labels: Sequence[int]) -> bool:
    for pts in blocks:
        lab = labels[alpha[pts[0]]]
        for x in pts[1:]:
            if labels[alpha[x]] != lab:
                return False
    return True


def phase_group(n: int, size_cap: int = 9, probe: int = 100) -> list[Perm]:
    """Permutations fixing every atom, found by scanning all of ``Sym(n)``.

    Fixing an atom means preserving both of its partitions, so the scan tests
    the distinct partitions occurring in atoms; a permutation is first checked
    against the partitions of the first ``probe`` atoms.
    """
    from .fact_omp import enumerate_atoms

    if n > size_cap:
        raise ValueError(f"size {n} exceeds the phase-group cap {size_cap}")
    parts: dict[Partition, None] = {}
    quick: dict[Partition, None] = {}
    for i, a in enumerate(enumerate_atoms(n)):
        for p in (a.first, a.second):
            parts.setdefault(p)
            if i < probe:
                quick.setdefault(p)
    quick_data = [(p.point_blocks(), p.labels) for p in quick]
    full_data = [(p.point_blocks(), p.labels) for p in parts if p not in quick]
    out = []
    for alpha in itertools.permutations(range(n)):
        if all(_preserves(alpha, b, lab) for b, lab in quick_data) and all(
            _preserves(alpha, b, lab) for b, lab in full_data
        ):
            out.append(alpha)
    return out


def block_transporter(
    b1: Sequence[Partition], b2: Sequence[Partition], sequencing: Sequence[int] | None = None
) -> Perm:
    """A permutation ``α`` with ``α·b1[i] = b2[sequencing[i]]`` for every part.

    Without a sequencing, parts are matched in order of block count.  A point
    is sent to the point whose block indices in ``b2`` copy its block indices
    in ``b1``; since both tuples are factor tuples this is a bijection.
    """
    if len(b1) != len(b2) or not is_factor_tuple(b1) or not is_factor_tuple(b2):
        raise ValueError("both arguments must be factor tuples of the same length")
    k = len(b1)
    if sequencing is None:
        o1 = sorted(range(k), key=lambda i: len(b1[i]))
        o2 = sorted(range(k), key=lambda i: len(b2[i]))
        sigma = [0] * k
        for i, j in zip(o1, o2):
            sigma[i] = j
    else:
        sigma = list(sequencing)
        if sorted(sigma) != list(range(k)):
            raise ValueError("sequencing is not a permutation")
    for i in range(k):
        if len(b1[i]) != len(b2[sigma[i]]):
            raise ValueError(f"part {i} has {len(b1[i])} blocks but its target has {len(b2[sigma[i]])}")
    n = b1[0].size
    target = {tuple(b2[sigma[i]].labels[y] for i in range(k)): y for y in range(n)}
    return tuple(target[tuple(b1[i].labels[x] for i in range(k))] for x in range(n))


def transports_block(alpha: Perm, b1: Sequence[Partition], b2: Sequence[Partition], sequencing: Sequence[int]) -> bool:
    a1 = atoms_of_block(b1)
    a2 = atoms_of_block(b2)
    return all(gamma_apply(alpha, a1[i]) == a2[sequencing[i]] for i in range(len(a1)))


def count_incidence_automorphisms(natoms: int, blocks: Sequence[Sequence[int]]) -> int:
    """Atom permutations mapping blocks onto blocks, counted by backtracking.

    Atoms are assigned in breadth-first order; each new image must match the
    new atom's degree and its co-block relation with every assigned atom, and
    every block whose atoms are all assigned must land on a block.
    """
    block_set = {frozenset(b) for b in blocks}
    adj = [set() for _ in range(natoms)]
    inc: list[list[frozenset[int]]] = [[] for _ in range(natoms)]
    for b in block_set:
        for a in b:
            adj[a] |= b - {a}
            inc[a].append(b)
    deg = [len(i) for i in inc]
    order: list[int] = []
    seen = [False] * natoms
    for s in range(natoms):
        if seen[s]:
            continue
        queue = [s]
        seen[s] = True
        while queue:
            u = queue.pop(0)
            order.append(u)
            for v in sorted(adj[u]):
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
    pos = {a: i for i, a in enumerate(order)}
    # blocks completed when the atom at a given position is assigned
    completes: list[list[frozenset[int]]] = [[] for _ in range(natoms)]
    for b in block_set:
        completes[max(pos[a] for a in b)].append(b)
    img = [-1] * natoms
    used = [False] * natoms
    count = 0

    def rec(i: int) -> None:
        nonlocal count
        if i == natoms:
            count += 1
            return
        u = order[i]
        for v in range(natoms):
            if used[v] or deg[v] != deg[u]:
                continue
            ok = True
            for w in order[:i]:
                if (w in adj[u]) != (img[w] in adj[v]):
                    ok = False
                    break
            if not ok:
                continue
            img[u] = v
            if all(frozenset(img[a] for a in b) in block_set for b in completes[i]):
                used[v] = True
                rec(i + 1)
                used[v] = False
            img[u] = -1

    rec(0)
    return count


def aut_order(s: OmpStructure) -> int:
    """Order of the automorphism group, from its connected summands.

    The structure is split into connected components; isomorphic components
    can be permuted freely, so the order is the product over isomorphism
    classes of ``|Aut(C)|^c · c!``.
    """
    hs = horizontal_sum_decomposition(s)
    total = 1
    for cls in hs.isomorphism_classes():
        comp = hs.components[cls[0]]
        natoms, blks = comp.incidence
        total *= count_incidence_automorphisms(natoms, blks) ** len(cls) * factorial(len(cls))
    return total


def gamma_image_order(n: int, phase_order: int) -> int:
    """Size of the image of ``Sym(n)`` in the automorphism group."""
    return factorial(n) // phase_order


def is_atom_automorphism(s: OmpStructure, mapping: Sequence[int]) -> bool:
    """Check that an atom map is a bijection carrying blocks onto blocks."""
    if not is_perm(mapping) or len(mapping) != len(s.atoms):
        return False
    blocks = {frozenset(b) for b in s.blocks}
    return all(frozenset(mapping[a] for a in b) in blocks for b in blocks)


def order_of_wreath(factor: int, copies: int) -> int:
    """``factor^copies · copies!``: order of ``G ≀ Sym(copies)`` for ``|G| = factor``."""
    return factor**copies * factorial(copies)
