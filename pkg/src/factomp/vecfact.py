"""Small finite fields, subspaces of ``GF(q)^k`` and the OMP of complementary subspace pairs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from .counting import is_prime
from .fact_omp import FactorPair, OmpStructure
from .partition_core import Partition

Vector = tuple[int, ...]


class FiniteField:
    """A field of order ``q`` given by addition and multiplication tables.

    Prime orders use arithmetic mod ``q``; order 4 uses ``{0, 1, x, x+1}``
    encoded as ``0..3`` with ``x^2 = x + 1``.
    """

    def __init__(self, q: int):
        if is_prime(q):
            r = np.arange(q)
            add = (r[:, None] + r[None, :]) % q
            mul = (r[:, None] * r[None, :]) % q
        elif q == 4:
            add = np.array([[a ^ b for b in range(4)] for a in range(4)])
            mul = np.array([
                [0, 0, 0, 0],
                [0, 1, 2, 3],
                [0, 2, 3, 1],
                [0, 3, 1, 2],
            ])
        else:
            raise ValueError(f"no field table for order {q}")
        self.q = q
        self.add = add
        self.mul = mul
        self.neg = np.array([int(np.flatnonzero(add[a] == 0)[0]) for a in range(q)])
        self.inv = np.array([0] + [int(np.flatnonzero(mul[a] == 1)[0]) for a in range(1, q)])
        self._check_axioms()

    def _check_axioms(self) -> None:
        q, A, M = self.q, self.add, self.mul
        r = range(q)
        assert (A == A.T).all() and (M == M.T).all()
        assert all(A[a, 0] == a and M[a, 1] == a for a in r)
        for a, b, c in itertools.product(r, r, r):
            assert A[A[a, b], c] == A[a, A[b, c]]
            assert M[M[a, b], c] == M[a, M[b, c]]
            assert M[a, A[b, c]] == A[M[a, b], M[a, c]]
        assert all(M[a, self.inv[a]] == 1 for a in range(1, q))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(self.q)

    def __repr__(self) -> str:
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def field(q: int) -> FiniteField:
    return FiniteField(q)


def _rref(F: FiniteField, rows: Sequence[Sequence[int]], k: int) -> tuple[Vector, ...]:
    M = [list(r) for r in rows]
    col = 0
    r = 0
    while r < len(M) and col < k:
        piv = next((i for i in range(r, len(M)) if M[i][col]), None)
        if piv is None:
            col += 1
            continue
        M[r], M[piv] = M[piv], M[r]
        s = F.inv[M[r][col]]
        M[r] = [int(F.mul[s, v]) for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col]:
                f = F.neg[M[i][col]]
                M[i] = [int(F.add[a, F.mul[f, b]]) for a, b in zip(M[i], M[r])]
        r += 1
        col += 1
    return tuple(tuple(row) for row in M[:r])


class Subspace:
    """A subspace of ``GF(q)^k`` held by its reduced row-echelon basis."""

    def __init__(self, F: FiniteField, k: int, basis: Sequence[Sequence[int]]):
        self.field = F
        self.k = k
        self.basis: tuple[Vector, ...] = _rref(F, basis, k)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def vectors(self) -> frozenset[Vector]:
        F = self.field
        out = set()
        for coeffs in itertools.product(range(F.q), repeat=self.dim):
            v = [0] * self.k
            for c, row in zip(coeffs, self.basis):
                v = [int(F.add[a, F.mul[c, b]]) for a, b in zip(v, row)]
            out.add(tuple(v))
        return frozenset(out)

    def __le__(self, other: Subspace) -> bool:
        return self.vectors <= other.vectors

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subspace) and self.k == other.k and self.field == other.field and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.field.q, self.k, self.basis))

    def __str__(self) -> str:
        if not self.basis:
            return "0" * self.k
        return ";".join("".join(map(str, row)) for row in self.basis)

    def __repr__(self) -> str:
        return f"Subspace(GF({self.field.q})^{self.k}, {self})"

    def sum(self, other: Subspace) -> Subspace:
        return Subspace(self.field, self.k, self.basis + other.basis)

    def meet_dim(self, other: Subspace) -> int:
        return self.dim + other.dim - self.sum(other).dim


def parse_subspace(q: int, text: str) -> Subspace:
    rows = [tuple(int(ch) for ch in row) for row in text.split(";")]
    return Subspace(field(q), len(rows[0]), rows)


def enumerate_subspaces(q: int, k: int, d: int) -> Iterator[Subspace]:
    """All ``d``-dimensional subspaces, generated from reduced echelon patterns."""
    if not 0 <= d <= k:
        raise ValueError(f"dimension {d} outside 0..{k}")
    F = field(q)
    for pivots in itertools.combinations(range(k), d):
        free = [(i, j) for i, c in enumerate(pivots) for j in range(c + 1, k) if j not in pivots]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * k for _ in range(d)]
            for i, c in enumerate(pivots):
                rows[i][c] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            yield Subspace(F, k, rows)


def gaussian_binomial(q: int, k: int, d: int) -> int:
    num = den = 1
    for i in range(d):
        num *= q ** (k - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@dataclass(frozen=True)
class SubspacePair:
    first: Subspace
    second: Subspace

    def complement(self) -> SubspacePair:
        return SubspacePair(self.second, self.first)

    def is_valid(self) -> bool:
        return self.first.dim + self.second.dim == self.first.k and self.first.sum(self.second).dim == self.first.k

    def __str__(self) -> str:
        return f"{self.first} / {self.second}"


def order_and_orthogonality(x: SubspacePair, y: SubspacePair) -> tuple[bool, bool]:
    if x.first.k != y.first.k or x.first.field != y.first.field:
        raise ValueError("pairs live in different spaces")
    le = x.first <= y.first and y.second <= x.second
    perp = x.first <= y.second and y.first <= x.second
    return le, perp


def _all_subspaces(q: int, k: int) -> list[list[Subspace]]:
    return [list(enumerate_subspaces(q, k, d)) for d in range(k + 1)]


def fact_v_structure(q: int, k: int, size_cap: int = 400) -> OmpStructure:
    """Complementary subspace pairs of ``GF(q)^k``; atoms have a line as first part."""
    if q**k > size_cap:
        raise ValueError(f"{q}^{k} points exceeds the cap {size_cap}")
    subs = _all_subspaces(q, k)
    elements: list[SubspacePair] = []
    for d in range(k + 1):
        for S in subs[d]:
            for T in subs[k - d]:
                if S.meet_dim(T) == 0:
                    elements.append(SubspacePair(S, T))
    elements.sort(key=lambda e: (e.first.dim != 0, e.first.dim == k, e.first.dim))
    lines = subs[1]
    atoms = [e for e in elements if e.first.dim == 1]
    index = {a: i for i, a in enumerate(atoms)}
    blocks = []
    for combo in itertools.combinations(range(len(lines)), k):
        ls = [lines[i] for i in combo]
        span = ls[0]
        for L in ls[1:]:
            span = span.sum(L)
        if span.dim != k:
            continue
        ids = []
        for i, L in enumerate(ls):
            rest = ls[:i] + ls[i + 1:]
            T = rest[0]
            for M in rest[1:]:
                T = T.sum(M)
            ids.append(index[SubspacePair(L, T)])
        blocks.append(tuple(sorted(ids)))
    return OmpStructure(f"FactV({q},{k})", atoms, blocks, elements=elements)


def standard_labeling(q: int, k: int) -> list[Vector]:
    """Point ``x`` gets the base-``q`` digits of ``x``, most significant first."""
    return [tuple(v) for v in itertools.product(range(q), repeat=k)]


def coset_partition(S: Subspace, labeling: Sequence[Vector]) -> Partition:
    F = S.field
    pos = {v: i for i, v in enumerate(labeling)}
    seen = 0
    blocks = []
    vecs = list(S.vectors)
    for x, v in enumerate(labeling):
        if seen >> x & 1:
            continue
        m = 0
        for s in vecs:
            w = tuple(int(F.add[a, b]) for a, b in zip(v, s))
            m |= 1 << pos[w]
        seen |= m
        blocks.append(m)
    return Partition(len(labeling), blocks)


def coset_embedding(q: int, k: int, labeling: Sequence[Sequence[int]]) -> Callable[[SubspacePair], FactorPair]:
    """Map ``(S, T)`` to the pair of coset partitions ``(X/S, X/T)`` under ``labeling``."""
    lab = [tuple(v) for v in labeling]
    if len(lab) != q**k or len(set(lab)) != len(lab) or any(len(v) != k or not all(0 <= c < q for c in v) for v in lab):
        raise ValueError("labeling is not a bijection onto GF(q)^k")
    cache: dict[Subspace, Partition] = {}

    def part(S: Subspace) -> Partition:
        if S not in cache:
            cache[S] = coset_partition(S, lab)
        return cache[S]

    def emb(x: SubspacePair) -> FactorPair:
        return FactorPair(part(x.first), part(x.second))

    return emb
