"""Exact matrices over the rationals or over GF(p)."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Sequence

import numpy as np

from .counting import is_prime


@dataclass
class Solution:
    consistent: bool
    particular: list[Fraction] | None
    nullity: int
    basis: list[list[Fraction]] = field(default_factory=list)
    rank: int = 0


def _content(row: dict[int, int]) -> int:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    return g


class ExactMatrix:
    """A dense matrix with integer entries interpreted over ``Q`` (``p=None``) or ``GF(p)``."""

    def __init__(self, rows: Sequence[Sequence[int]], p: int | None = None):
        self.rows = [list(map(int, r)) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged rows")
        self.p = p
        if p is not None:
            self.rows = [[v % p for v in r] for r in self.rows]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.rows[ij[0]][ij[1]]

    def row_sums(self) -> list[int]:
        return [sum(r) for r in self.rows]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> ExactMatrix:
        return ExactMatrix([[self.rows[i][j] for j in cols] for i in rows], self.p)

    def over(self, p: int | None) -> ExactMatrix:
        return ExactMatrix(self.rows, p)

    def rank(self) -> int:
        if self.p is None:
            return _solve_rational(self.rows, None).rank
        return rank_mod_p(self.rows, self.p)

    def nullity(self) -> int:
        return self.ncols - self.rank()

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        if self.p is None:
            return bareiss_det(self.rows)
        return det_mod_p(self.rows, self.p)

    def solve(self, rhs: Sequence[int]) -> Solution:
        if self.p is not None:
            raise NotImplementedError("affine solve is implemented over Q only")
        return _solve_rational(self.rows, list(rhs))


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant."""
    M = [list(r) for r in rows]
    n = len(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


def _solve_rational(rows: Sequence[Sequence[int]], rhs: list[int] | None) -> Solution:
    """Sparse fraction-free Gauss-Jordan elimination, then rational read-off.

    Rows are kept as primitive integer vectors (divided by their content), and
    pivots are chosen per column as the sparsest available row.
    """
    ncols = len(rows[0]) if rows else 0
    aug = ncols  # index of the right-hand side
    R: list[dict[int, int]] = []
    for i, r in enumerate(rows):
        d = {j: v for j, v in enumerate(r) if v}
        if rhs is not None and rhs[i]:
            d[aug] = rhs[i]
        R.append(d)
    col_rows: dict[int, set[int]] = {}
    for i, d in enumerate(R):
        for j in d:
            col_rows.setdefault(j, set()).add(i)
    pivot_of: dict[int, int] = {}
    used: set[int] = set()
    for c in range(ncols):
        cands = [i for i in col_rows.get(c, ()) if i not in used]
        if not cands:
            continue
        p = min(cands, key=lambda i: (len(R[i]), i))
        used.add(p)
        pivot_of[c] = p
        prow = R[p]
        pv = prow[c]
        for i in list(col_rows[c]):
            if i == p:
                continue
            row = R[i]
            f = row[c]
            g = gcd(pv, f)
            a, b = pv // g, f // g
            new = {j: a * v for j, v in row.items()}
            for j, v in prow.items():
                w = new.get(j, 0) - b * v
                if w:
                    new[j] = w
                else:
                    new.pop(j, None)
            cont = _content(new)
            if cont > 1:
                new = {j: v // cont for j, v in new.items()}
            for j in row.keys() - new.keys():
                col_rows[j].discard(i)
            for j in new.keys() - row.keys():
                col_rows.setdefault(j, set()).add(i)
            R[i] = new
    rank = len(pivot_of)
    free = [c for c in range(ncols) if c not in pivot_of]
    consistent = all(not (d.keys() == {aug}) for i, d in enumerate(R) if i not in used)
    if not consistent:
        return Solution(False, None, len(free), [], rank)
    particular = [Fraction(0)] * ncols
    for c, i in pivot_of.items():
        particular[c] = Fraction(R[i].get(aug, 0), R[i][c])
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for c, i in pivot_of.items():
            if f in R[i]:
                vec[c] = Fraction(-R[i][f], R[i][c])
        basis.append(vec)
    return Solution(True, particular if rhs is not None else None, len(free), basis, rank)


def _reduce_mod_p(rows: Sequence[Sequence[int]], p: int) -> tuple[np.ndarray, int, int]:
    """Row-reduce mod ``p``; returns the matrix, its rank and the determinant sign/product."""
    if p >= 1 << 31:
        raise ValueError("modulus must stay below 2**31 to keep int64 products exact")
    A = np.array(rows, dtype=np.int64) % p
    nr, nc = A.shape if A.size else (len(rows), 0)
    r = 0
    det = 1
    for c in range(nc):
        if r == nr:
            break
        nz = np.flatnonzero(A[r:, c])
        if len(nz) == 0:
            det = 0
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
            det = -det
        pv = int(A[r, c])
        det = det * pv % p
        A[r] = A[r] * pow(pv, -1, p) % p
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        if len(others):
            A[others] = (A[others] - A[others, c][:, None] * A[r][None, :]) % p
        r += 1
    return A, r, det % p


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    return _reduce_mod_p(rows, p)[1]


def det_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    A, r, det = _reduce_mod_p(rows, p)
    return det if r == len(rows) else 0


def random_primes(count: int, rng: random.Random, bits: int = 31) -> list[int]:
    out: list[int] = []
    while len(out) < count:
        cand = rng.randrange(1 << (bits - 1), 1 << bits) | 1
        if is_prime(cand) and cand not in out:
            out.append(cand)
    return out


def crt_symmetric(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Chinese remaindering to the representative of least absolute value."""
    M = prod(moduli)
    x = 0
    for r, m in zip(residues, moduli):
        Mi = M // m
        x += r * Mi * pow(Mi, -1, m)
    x %= M
    return x - M if x > M // 2 else x


def hadamard_bound(rows: Sequence[Sequence[int]]) -> int:
    """An integer upper bound on ``|det|``: product of row 2-norms, rounded up."""
    from math import isqrt

    bound = 1
    for r in rows:
        s = sum(v * v for v in r)
        root = isqrt(s)
        bound *= root if root * root == s else root + 1
    return bound
