"""Canonical labelling of atom/block incidence structures.

The incidence structure is viewed as a bipartite graph (atoms on one side,
blocks on the other).  Colour refinement followed by individualisation of the
first non-singleton cell explores a search tree whose leaves are discrete
colourings; the lexicographically least relabelled edge list is the canonical
code.  Since the whole tree is walked, the number of leaves that reproduce the
canonical code equals the order of the automorphism group.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

Code = tuple[int, int, tuple[tuple[int, int], ...]]


@dataclass(frozen=True)
class Certificate:
    code: Code
    automorphisms: int
    leaves: int


def _rank(signatures: list) -> list[int]:
    order = {s: i for i, s in enumerate(sorted(set(signatures)))}
    return [order[s] for s in signatures]


def _refine(colors: list[int], adj: list[list[int]]) -> list[int]:
    ncls = len(set(colors))
    while True:
        sig = [(colors[v], tuple(sorted(Counter(colors[u] for u in adj[v]).items()))) for v in range(len(adj))]
        new = _rank(sig)
        k = len(set(new))
        if k == ncls:
            return new
        colors, ncls = new, k


def certify(natoms: int, blocks: Sequence[Sequence[int]]) -> Certificate:
    """Canonical code and automorphism count of an incidence structure."""
    nb = len(blocks)
    n = natoms + nb
    adj: list[list[int]] = [[] for _ in range(n)]
    edges = []
    for j, blk in enumerate(blocks):
        for a in blk:
            adj[a].append(natoms + j)
            adj[natoms + j].append(a)
            edges.append((a, natoms + j))
    best: Code | None = None
    hits = 0
    leaves = 0

    def walk(colors: list[int]) -> None:
        nonlocal best, hits, leaves
        colors = _refine(colors, adj)
        sizes = Counter(colors)
        target = min((c for c, s in sizes.items() if s > 1), default=None)
        if target is None:
            leaves += 1
            code = (natoms, nb, tuple(sorted((colors[a], colors[b]) for a, b in edges)))
            if best is None or code < best:
                best, hits = code, 1
            elif code == best:
                hits += 1
            return
        for v in range(n):
            if colors[v] == target:
                walk([2 * c + (c == target and u != v) for u, c in enumerate(colors)])

    walk([0] * natoms + [1] * nb)
    assert best is not None
    return Certificate(best, hits, leaves)
