"""Finite bounded posets with an orthocomplement, stored as a dense order matrix."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class OrthoPoset:
    """``leq[i, j]`` is true iff element ``i`` lies below element ``j``.

    ``comp[i]`` is the index of the orthocomplement of ``i``; it may be omitted
    for plain posets (only the orthocomplementation search needs that).
    """

    def __init__(self, leq: np.ndarray, comp: Sequence[int] | None = None, labels: Sequence | None = None):
        self.leq = np.asarray(leq, dtype=bool)
        n = self.leq.shape[0]
        if self.leq.shape != (n, n):
            raise ValueError("order matrix must be square")
        self.comp = None if comp is None else np.asarray(comp, dtype=np.int64)
        self.labels = labels
        self.size = n
        below_all = np.flatnonzero(self.leq.all(axis=1))
        above_all = np.flatnonzero(self.leq.all(axis=0))
        self.bottom = int(below_all[0]) if len(below_all) == 1 else None
        self.top = int(above_all[0]) if len(above_all) == 1 else None

    def _least(self, mask: np.ndarray) -> int | None:
        idx = np.flatnonzero(mask)
        if len(idx) == 0:
            return None
        sub = self.leq[np.ix_(idx, idx)]
        hits = np.flatnonzero(sub.all(axis=1))
        return int(idx[hits[0]]) if len(hits) else None

    def _greatest(self, mask: np.ndarray) -> int | None:
        idx = np.flatnonzero(mask)
        if len(idx) == 0:
            return None
        sub = self.leq[np.ix_(idx, idx)]
        hits = np.flatnonzero(sub.all(axis=0))
        return int(idx[hits[0]]) if len(hits) else None

    def join(self, i: int, j: int) -> int | None:
        """Least upper bound, or ``None`` when it does not exist."""
        return self._least(self.leq[i] & self.leq[j])

    def meet(self, i: int, j: int) -> int | None:
        return self._greatest(self.leq[:, i] & self.leq[:, j])

    def orthogonal(self, i: int, j: int) -> bool:
        return bool(self.leq[i, self.comp[j]])

    def atoms(self) -> list[int]:
        """Elements whose only strict lower bound is the bottom."""
        strict = self.leq & ~np.eye(self.size, dtype=bool)
        below = strict.sum(axis=0)
        return [int(i) for i in np.flatnonzero(below == 1)]


@dataclass
class AxiomReport:
    """Outcome of :func:`verify_omp_axioms`.

    The standard checks decide :attr:`ok`.  ``literal_condition`` records the
    variant "x ⊥ y′ implies x ∨ (x ∨ y)′ = y′" and ``consistent_reading`` the
    variant "x ⊥ y implies y′ = x ∨ (x ∨ y)′"; both are informational.
    """

    checks: dict[str, bool] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    literal_condition: dict[str, int] = field(default_factory=dict)
    consistent_reading: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def _fail(self, name: str, witness: str) -> None:
        self.checks[name] = False
        if len(self.violations) < 20:
            self.violations.append(f"{name}: {witness}")


def verify_omp_axioms(poset: OrthoPoset) -> AxiomReport:
    L = poset.leq
    n = poset.size
    comp = poset.comp
    if comp is None:
        raise ValueError("poset has no orthocomplement")
    rep = AxiomReport()
    names = ["partial_order", "bounded", "involution", "order_inverting",
             "complementation", "orthogonal_joins", "orthomodular"]
    for name in names:
        rep.checks[name] = True

    if not L.diagonal().all():
        rep._fail("partial_order", "not reflexive")
    anti = L & L.T & ~np.eye(n, dtype=bool)
    if anti.any():
        i, j = map(int, np.argwhere(anti)[0])
        rep._fail("partial_order", f"{i} <= {j} <= {i}")
    Lf = L.astype(np.float32)
    trans = (Lf @ Lf > 0) & ~L
    if trans.any():
        i, j = map(int, np.argwhere(trans)[0])
        rep._fail("partial_order", f"transitivity fails from {i} to {j}")
    if poset.bottom is None or poset.top is None:
        rep._fail("bounded", "no unique bottom or top")
        return rep
    zero, one = poset.bottom, poset.top

    if sorted(comp.tolist()) != list(range(n)) or (comp[comp] != np.arange(n)).any():
        rep._fail("involution", "complement is not an involutive bijection")
        return rep
    flipped = L[np.ix_(comp, comp)].T
    if (L & ~flipped).any():
        i, j = map(int, np.argwhere(L & ~flipped)[0])
        rep._fail("order_inverting", f"{i} <= {j} but {j}' not <= {i}'")

    for x in range(n):
        if poset.meet(x, int(comp[x])) != zero or poset.join(x, int(comp[x])) != one:
            rep._fail("complementation", f"element {x}")

    lit_hold = lit_fail = cons_hold = cons_fail = 0
    for x, y in np.argwhere(L[:, comp]):
        # here x <= y', i.e. x is orthogonal to y
        x, y = int(x), int(y)
        j = poset.join(x, y)
        if j is None:
            rep._fail("orthogonal_joins", f"{x} _|_ {y} has no join")
            continue
        rhs = poset.join(x, int(comp[j]))
        if rhs == int(comp[y]):
            cons_hold += 1
        else:
            cons_fail += 1
    for x, y in np.argwhere(L):
        x, y = int(x), int(y)
        # literal variant: x _|_ y' means x <= y
        jxy = poset.join(x, y)
        val = None if jxy is None else poset.join(x, int(comp[jxy]))
        if val == int(comp[y]):
            lit_hold += 1
        else:
            lit_fail += 1
        m = poset.meet(y, int(comp[x]))
        if m is None or poset.join(x, m) != y:
            rep._fail("orthomodular", f"{x} <= {y}")
    rep.literal_condition = {"holds": lit_hold, "fails": lit_fail}
    rep.consistent_reading = {"holds": cons_hold, "fails": cons_fail}
    return rep


def count_orthocomplementations(poset: OrthoPoset, limit: int | None = None) -> int:
    """Count order-reversing involutions ``c`` with ``x ∧ c(x) = 0`` and ``x ∨ c(x) = 1``.

    Backtracking with forward checking: ``dom[u, v]`` says ``c(u) = v`` is still
    possible, and every assignment prunes all domains at once.
    """
    n = poset.size
    L = poset.leq
    if poset.bottom is None or poset.top is None:
        return 0
    zero, one = poset.bottom, poset.top
    dom = np.zeros((n, n), dtype=bool)
    for x in range(n):
        for y in range(x + 1, n):
            if poset.meet(x, y) == zero and poset.join(x, y) == one:
                dom[x, y] = dom[y, x] = True
    count = 0

    def assign(d: np.ndarray, x: int, y: int) -> np.ndarray:
        d = d.copy()
        d[:, x] = d[:, y] = False
        d[x] = d[y] = False
        d &= (~L[:, x])[:, None] | L[y][None, :]
        d &= (~L[x, :])[:, None] | L[:, y][None, :]
        d &= (~L[:, y])[:, None] | L[x][None, :]
        d &= (~L[y, :])[:, None] | L[:, x][None, :]
        d &= d.T
        return d

    def search(d: np.ndarray, free: np.ndarray) -> None:
        nonlocal count
        if limit is not None and count >= limit:
            return
        if not free.any():
            count += 1
            return
        sizes = np.where(free, d.sum(axis=1), n + 1)
        x = int(np.argmin(sizes))
        if sizes[x] == 0:
            return
        for y in np.flatnonzero(d[x]):
            y = int(y)
            nxt = free.copy()
            nxt[x] = nxt[y] = False
            search(assign(d, x, y), nxt)

    search(dom, np.ones(n, dtype=bool))
    return count


def pair_poset(
    elements: Sequence,
    includes: Callable[[object, object], bool],
    compatible: Callable[[object, object], bool] | None = None,
) -> OrthoPoset:
    """Order elements given as ``(first, second)`` pairs.

    ``x ≤ y`` iff ``x.first ⊆ y.first``, ``y.second ⊆ x.second`` and
    ``compatible(x.first, y.second)``.  Components are interned first so the
    matrix is filled by array indexing rather than pairwise calls.
    """
    index: dict = {}
    comps: list = []
    for e in elements:
        for c in (e.first, e.second):
            if c not in index:
                index[c] = len(comps)
                comps.append(c)
    k = len(comps)
    inc = np.array([[includes(u, v) for v in comps] for u in comps], dtype=bool)
    if compatible is None:
        cmp = np.ones((k, k), dtype=bool)
    else:
        cmp = np.array([[compatible(u, v) for v in comps] for u in comps], dtype=bool)
    f = np.array([index[e.first] for e in elements])
    s = np.array([index[e.second] for e in elements])
    leq = inc[f[:, None], f[None, :]] & inc[s[None, :], s[:, None]] & cmp[f[:, None], s[None, :]]
    pos = {e: i for i, e in enumerate(elements)}
    comp = [pos[e.complement()] for e in elements]
    return OrthoPoset(leq, comp, list(elements))
