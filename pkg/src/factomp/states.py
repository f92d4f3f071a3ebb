"""States and group-valued measures of finite OMPs via their block/atom incidence."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .counting import is_prime
from .exact import ExactMatrix, rank_mod_p
from .fact_omp import OmpStructure, atoms_of_block, subalgebra_from_linear_structure
from .partition_core import Partition


@dataclass
class StateSolution:
    consistent: bool
    particular: list[Fraction] | None
    nullity: int
    basis: list[list[Fraction]] = field(default_factory=list)

    @property
    def unique(self) -> bool:
        return self.consistent and self.nullity == 0

    @property
    def constant_value(self) -> Fraction | None:
        """The common atom value when the unique solution is constant."""
        if not self.unique or not self.particular:
            return None
        vals = set(self.particular)
        return vals.pop() if len(vals) == 1 else None


def incidence_matrix(s: OmpStructure) -> ExactMatrix:
    """Rows are blocks, columns atoms; entry 1 when the atom lies in the block."""
    rows = []
    for blk in s.blocks:
        r = [0] * len(s.atoms)
        for a in blk:
            r[a] = 1
        rows.append(r)
    return ExactMatrix(rows)


def check_state(s: OmpStructure, values: list[Fraction]) -> bool:
    """Every block's atom values add to 1 and all values lie in ``[0, 1]``."""
    if any(v < 0 or v > 1 for v in values):
        return False
    return all(sum(values[a] for a in blk) == 1 for blk in s.blocks)


def solve_states(s: OmpStructure) -> StateSolution:
    A = incidence_matrix(s)
    sol = A.solve([1] * A.nrows)
    out = StateSolution(sol.consistent, sol.particular, sol.nullity, sol.basis)
    if out.unique and not check_state(s, out.particular):
        raise AssertionError("solver returned a vector that is not a state")
    return out


@dataclass
class LocalStateReport:
    sampled: int
    embedded: int
    forced_value: Fraction | None
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.embedded == self.sampled and self.forced_value == Fraction(1, 3)


def block_labeling(parts: tuple[Partition, ...]) -> list[tuple[int, ...]]:
    """Coordinates of each point: its block index in every part."""
    n = parts[0].size
    return [tuple(p.labels[x] for p in parts) for x in range(n)]


@lru_cache(maxsize=None)
def _linear_state(p: int, k: int) -> StateSolution:
    from .vecfact import fact_v_structure

    return solve_states(fact_v_structure(p, k))


def random_block(size: int, p: int, k: int, rng: random.Random) -> tuple[Partition, ...]:
    """A uniformly relabelled coordinate block of ``p**k`` points."""
    pts = list(range(size))
    rng.shuffle(pts)
    parts = []
    for i in range(k):
        groups: dict[int, int] = {}
        for x, y in enumerate(pts):
            digit = (x // p ** (k - 1 - i)) % p
            groups[digit] = groups.get(digit, 0) | (1 << y)
        parts.append(Partition(size, groups.values()))
    return tuple(sorted(parts))


def solve_states_27_local(samples: int = 50, seed: int = 0) -> LocalStateReport:
    """Check, one sampled block at a time, that a linear sub-structure forces the value 1/3.

    Each sampled block of the 27-point factor-pair OMP is read as a coordinate
    system for ``GF(3)^3``; the induced 117-atom sub-OMP must contain the
    block, and its only state is the constant 1/3.  The sub-OMPs all share one
    incidence pattern, so the rational solve happens once.
    """
    rng = random.Random(seed)
    sol = _linear_state(3, 3)
    forced = sol.constant_value
    rep = LocalStateReport(samples, 0, forced)
    for t in range(samples):
        block = random_block(27, 3, 3, rng)
        sub = subalgebra_from_linear_structure(block_labeling(block), 3, 3)
        index = sub.atom_index
        wanted = atoms_of_block(block)
        ids = sorted(index.get(a, -1) for a in wanted)
        if -1 in ids:
            rep.failures.append(f"sample {t}: block atoms missing from the linear sub-structure")
            continue
        if tuple(ids) not in set(sub.blocks):
            rep.failures.append(f"sample {t}: block is not a block of the sub-structure")
            continue
        rep.embedded += 1
    return rep


def measure_rows(s: OmpStructure) -> list[list[int]]:
    """Homogeneous system: per block, sum of atom values minus the shared value ``σ(1)``."""
    n = len(s.atoms)
    rows = []
    for blk in s.blocks:
        r = [0] * (n + 1)
        for a in blk:
            r[a] = 1
        r[n] = -1
        rows.append(r)
    return rows


def measure_nullity(s: OmpStructure, p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    rows = measure_rows(s)
    return len(rows[0]) - rank_mod_p(rows, p)


def count_gfp_measures(s: OmpStructure, p: int) -> int:
    """Number of ``GF(p)``-valued measures: ``p`` to the nullity of the block system."""
    return p ** measure_nullity(s, p)


def count_group_measures(s: OmpStructure, primes: list[int]) -> int:
    """Measures valued in the additive group ``Z_p1 × ... × Z_pr``.

    A measure into a product is a tuple of measures into the factors, so the
    count is the product of the per-factor counts.  ``GF(4)`` as a group is
    ``Z_2 × Z_2``.
    """
    out = 1
    for p in primes:
        out *= count_gfp_measures(s, p)
    return out
