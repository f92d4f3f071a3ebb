"""Closed-form counts for factor relations, factor pairs, atoms and blocks.

Every division is checked to be exact, so a wrong formula shows up as an
error rather than a silently truncated integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, prod


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_factors(n: int) -> list[int]:
    """Prime factors of ``n`` with multiplicity, ascending."""
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _exact(num: int, den: int) -> int:
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"{num} is not divisible by {den}")
    return q


def _need_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def cf_factor_relations(m: int, n: int) -> int:
    """Partitions of an ``mn``-set into ``m`` blocks of ``n``."""
    return _exact(factorial(m * n), factorial(m) * factorial(n) ** m)


def cf_companions(m: int, n: int) -> int:
    return factorial(n) ** (m - 1)


def cf_factor_pairs(m: int, n: int) -> int:
    """Factor pairs whose first part has ``m`` blocks of ``n``."""
    return _exact(factorial(m * n), factorial(m) * factorial(n))


def cf_atoms_prime_power(p: int, k: int) -> int:
    _need_prime(p)
    return _exact(factorial(p**k), factorial(p) * factorial(p ** (k - 1)))


def cf_blocks_prime_power(p: int, k: int) -> int:
    _need_prime(p)
    return _exact(factorial(p**k), factorial(k) * factorial(p) ** k)


def cf_blocks_per_atom(p: int, k: int) -> int:
    _need_prime(p)
    return _exact(factorial(p ** (k - 1)), factorial(k - 1) * factorial(p) ** (k - 1))


def _need_dim(k: int) -> None:
    if k < 1:
        raise ValueError("dimension must be at least 1")


def cf_vec_atoms(n: int, k: int) -> int:
    """Atoms of the complementary-subspace OMP of an ``n``-element field's ``k``-space."""
    _need_dim(k)
    return _exact(n**k - 1, n - 1) * n ** (k - 1)


def cf_vec_blocks(n: int, k: int) -> int:
    _need_dim(k)
    num = prod(n**k - n**i for i in range(k))
    return _exact(num, factorial(k) * (n - 1) ** k)


def cf_vec_blocks_per_atom(n: int, k: int) -> int:
    _need_dim(k)
    num = prod(n**k - n**i for i in range(1, k))
    return _exact(num, factorial(k - 1) * n ** (k - 1) * (n - 1) ** (k - 1))


def cf_zp_block_counts(p: int) -> tuple[int, int, int]:
    """Linear sub-structures on a ``p**3``-set: total, per atom, per block."""
    _need_prime(p)
    n = p**3
    total = _exact(factorial(n - 1), (n - 1) * (n - p) * (n - p * p))
    m = p * p
    per_atom = _exact(factorial(m - 1) * factorial(p - 2), (m - 1) * (m - p))
    return total, per_atom, factorial(p - 2)


def cf_mo_n(p: int, q: int) -> int:
    """``n`` such that Fact of a ``pq``-set is ``MO_n``."""
    _need_prime(p)
    _need_prime(q)
    n = _exact(factorial(p * q), factorial(p) * factorial(q))
    return n // 2 if p == q else n


@dataclass(frozen=True)
class CountReport:
    label: str
    parameters: tuple[int, ...]
    value: int

    def __post_init__(self) -> None:
        if self.label not in FORMULAS:
            raise ValueError(f"unknown formula {self.label!r}")
        if self.value < 0:
            raise ValueError("counts are non-negative")


FORMULAS = {
    "factor_relations": cf_factor_relations,
    "companions": cf_companions,
    "factor_pairs": cf_factor_pairs,
    "atoms_prime_power": cf_atoms_prime_power,
    "blocks_prime_power": cf_blocks_prime_power,
    "blocks_per_atom": cf_blocks_per_atom,
    "vec_atoms": cf_vec_atoms,
    "vec_blocks": cf_vec_blocks,
    "vec_blocks_per_atom": cf_vec_blocks_per_atom,
    "mo_n": cf_mo_n,
}


def report(label: str, *params: int) -> CountReport:
    return CountReport(label, params, FORMULAS[label](*params))


def standard_table() -> list[CountReport]:
    """The counts printed by the ``formulas`` command."""
    rows = [report("factor_relations", m, n) for m, n in [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (3, 3), (9, 3)]]
    rows += [report("companions", m, n) for m, n in [(2, 2), (2, 3), (9, 3)]]
    rows += [report("factor_pairs", m, n) for m, n in [(2, 2), (2, 3), (3, 3)]]
    for p, k in [(2, 2), (2, 3), (3, 2), (3, 3)]:
        rows += [report(lbl, p, k) for lbl in ("atoms_prime_power", "blocks_prime_power", "blocks_per_atom")]
    for n, k in [(2, 2), (2, 3), (3, 2), (3, 3)]:
        rows += [report(lbl, n, k) for lbl in ("vec_atoms", "vec_blocks", "vec_blocks_per_atom")]
    rows += [report("mo_n", p, q) for p, q in [(2, 2), (2, 3), (3, 3)]]
    return rows
