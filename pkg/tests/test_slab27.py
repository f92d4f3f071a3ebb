"""27-point slabs, the third family, nearness, chains and automorphism oracles."""

from __future__ import annotations

import itertools
import random

import pytest

from factomp.autom import apply_partition, gamma_apply, random_perm
from factomp.fact_omp import FactorPair, atoms_of_block, orthogonal
from factomp.partition_core import Partition, compose, make_partition, meet_all
from factomp.slab27 import (
    AutomorphismOracle,
    NotASlab,
    OracleError,
    SlabError,
    build_slab,
    build_triple,
    build_z,
    canonical_companion,
    chain_same_first,
    chain_same_second,
    check_order_preservation,
    from_grid,
    grid_of,
    in_z,
    is_chain,
    is_small,
    near_first,
    near_first_witness,
    near_second,
    near_second_witness,
    orthogonal_triple,
    phi_large,
    phi_req,
    phi_small,
    random_atom,
    random_companion,
    random_large,
    random_orthogonal_partner,
    random_small,
    recover_slab,
    slab_orthogonality,
)
from factomp.states import random_block
from oracles import grid_symmetries, orthogonal_triple as naive_orthogonal_triple
from oracles import relation

N = 27


def grid_atom(rows: list[list[int]]) -> FactorPair:
    """Atom from a 9x3 array written with points 1..27."""
    return from_grid([[p - 1 for p in r] for r in rows])


STANDARD = [[r, r + 9, r + 18] for r in range(1, 10)]


def coordinate_pair() -> tuple[Partition, Partition]:
    """Points ``(i, j, k)`` of a 3x3x3 cube; ``a`` varies ``i``, ``b`` varies ``j``."""
    pt = lambda i, j, k: 9 * k + 3 * j + i  # noqa: E731
    a = make_partition(N, [[pt(i, j, k) for i in range(3)] for j in range(3) for k in range(3)])
    b = make_partition(N, [[pt(i, j, k) for j in range(3)] for i in range(3) for k in range(3)])
    return a, b


def random_pair(rng):
    a = random_small(rng)
    return a, random_orthogonal_partner(a, rng)


class TestSlabs:
    def test_coordinate_slab(self):
        a, b = coordinate_pair()
        X, Y = build_slab(a, b, "X"), build_slab(a, b, "Y")
        assert len(X.atoms) == len(Y.atoms) == 36
        assert slab_orthogonality(X, Y)
        assert meet_all(X.second_spots()) == b and meet_all(Y.second_spots()) == a

    @pytest.mark.parametrize("seed", range(10))
    def test_random_slabs(self, seed):
        rng = random.Random(seed)
        a, b = random_pair(rng)
        X, Y = build_slab(a, b, "X"), build_slab(a, b, "Y")
        assert slab_orthogonality(X, Y)
        assert recover_slab(X.atoms) == (a, b)
        assert recover_slab(Y.atoms) == (b, a)

    def test_equal_pair_rejected(self):
        a = random_small(random.Random(0))
        with pytest.raises(SlabError):
            build_slab(a, a)

    def test_x_against_x_not_orthogonal(self):
        a, b = random_pair(random.Random(1))
        X = build_slab(a, b)
        assert not any(orthogonal(x, y) for x, y in itertools.combinations(X.atoms, 2))

    def test_wrong_partner_not_orthogonal(self):
        rng = random.Random(2)
        a, b = random_pair(rng)
        X = build_slab(a, b, "X")
        c = random_orthogonal_partner(a, rng)
        assert c != b
        assert not slab_orthogonality(X, build_slab(a, c, "Y"))

    def test_recover_rejects_tampering(self):
        rng = random.Random(3)
        a, b = random_pair(rng)
        atoms = list(build_slab(a, b).atoms)
        atoms[0] = random_atom(rng)
        with pytest.raises(NotASlab):
            recover_slab(atoms)
        with pytest.raises(NotASlab):
            recover_slab(atoms[:35])

    def test_equivariance(self):
        rng = random.Random(4)
        a, b = random_pair(rng)
        alpha = random_perm(N, rng)
        image = [gamma_apply(alpha, x) for x in build_slab(a, b).atoms]
        assert recover_slab(image) == (apply_partition(alpha, a), apply_partition(alpha, b))


class TestZ:
    def test_coordinate_count_against_relation_oracle(self):
        # A member cC of Z has c-blocks that are transversals of the three
        # layers of C; for a∘c and b∘c to have blocks of 9 the layer-to-layer
        # bijections must carry rows to rows and columns to columns.  The
        # oracle also tries the row/column swaps, then tests every candidate
        # with relation arithmetic.
        a, b = coordinate_pair()
        ra, rb = relation(a.point_blocks()), relation(b.point_blocks())
        pt = lambda g, k: 9 * k + 3 * g[1] + g[0]  # noqa: E731
        cells = [(i, j) for i in range(3) for j in range(3)]
        syms = grid_symmetries()
        found = set()
        for s1 in syms:
            for s2 in syms:
                blocks = [[pt(g, 0), pt(s1[g], 1), pt(s2[g], 2)] for g in cells]
                if naive_orthogonal_triple(ra, rb, relation(blocks), N):
                    found.add(make_partition(N, blocks))
        Z = build_z(a, b)
        assert {z.first for z in Z} == found
        assert len(found) == 1296

    def test_random_pairs_and_membership(self):
        rng = random.Random(5)
        for _ in range(5):
            a, b = random_pair(rng)
            Z = build_z(a, b)
            assert len(Z) == 1296
            C = compose(a, b)
            assert all(z.second == C for z in Z)
            assert all(in_z(a, b, z) for z in list(Z)[:50])

    def test_triple_witnesses_are_orthogonal(self):
        a, b = random_pair(random.Random(6))
        T = build_triple(a, b)
        for z, (x, y) in list(T.witnesses.items())[:100]:
            assert orthogonal(x, y) and orthogonal(x, z) and orthogonal(y, z)

    def test_pair_determines_third(self):
        a, b = coordinate_pair()
        T = build_triple(a, b)
        for z, (x, y) in list(T.witnesses.items())[:100]:
            c = z.first
            assert is_small(c) and orthogonal_triple(a, b, c)
            assert x.second == compose(b, c) and y.second == compose(a, c)


class TestNearness:
    def test_switching_figure(self):
        x = grid_atom(STANDARD)
        y_rows = [r[:] for r in STANDARD]
        for r in range(3):
            y_rows[r][0], y_rows[r][1] = y_rows[r][1], y_rows[r][0]
        y = grid_atom(y_rows)
        assert near_first(x, y) and near_first(y, x)
        d = near_first_witness(x, y)
        assert {x, y} <= set(build_slab(x.first, d).atoms)
        assert make_partition(N, [[c + 3 * i + 9 * k for c in range(3)] for i in range(3) for k in range(3)]) == d

    def test_second_spot_figure(self):
        x = grid_atom(STANDARD)
        y = grid_atom([[1, 10, 20], [2, 11, 19], [3, 12, 22], [4, 13, 21], [5, 14, 24], [6, 15, 23],
                       [7, 16, 25], [8, 17, 26], [9, 18, 27]])
        assert x.second == y.second
        assert near_second(x, y) and near_second(y, x)
        p, q = near_second_witness(x, y)
        Z = build_z(p, q)
        assert x in Z and y in Z

    def test_irreflexive(self):
        x = random_atom(random.Random(7))
        assert not near_first(x, x) and not near_second(x, x)

    def test_two_swaps_not_near(self):
        y = grid_atom([[1, 10, 20], [2, 11, 19], [3, 12, 22], [4, 13, 21]] + STANDARD[4:])
        assert not near_second(grid_atom(STANDARD), y)

    def test_mismatched_spots(self):
        rng = random.Random(8)
        with pytest.raises(ValueError):
            near_first(random_atom(rng), random_atom(rng))
        with pytest.raises(ValueError):
            near_second(random_atom(rng), random_atom(rng))

    def test_equivariance(self):
        rng = random.Random(9)
        x = grid_atom(STANDARD)
        y_rows = [r[:] for r in STANDARD]
        for r in range(3):
            y_rows[r][0], y_rows[r][1] = y_rows[r][1], y_rows[r][0]
        y = grid_atom(y_rows)
        alpha = random_perm(N, rng)
        assert near_first(gamma_apply(alpha, x), gamma_apply(alpha, y))


class TestChains:
    def test_single_swap_first(self):
        x = grid_atom(STANDARD)
        rows = [r[:] for r in STANDARD]
        rows[0][0], rows[0][1] = rows[0][1], rows[0][0]
        y = grid_atom(rows)
        chain = chain_same_first(x, y)
        assert len(chain) <= 5 and chain[-1] == y and is_chain(x, chain, near_first)

    def test_single_swap_second(self):
        x = grid_atom(STANDARD)
        rows = [r[:] for r in STANDARD]
        rows[0][0], rows[1][0] = rows[1][0], rows[0][0]
        y = grid_atom(rows)
        chain = chain_same_second(x, y)
        assert len(chain) <= 3 and chain[-1] == y and is_chain(x, chain, near_second)

    def test_empty(self):
        x = random_atom(random.Random(10))
        assert chain_same_first(x, x) == [] and chain_same_second(x, x) == []

    @pytest.mark.parametrize("seed", range(25))
    def test_random_pairs(self, seed):
        rng = random.Random(seed)
        x = random_atom(rng)
        y1 = FactorPair(x.first, random_companion(x.first, rng))
        y2 = FactorPair(random_companion(x.second, rng), x.second)
        c1, c2 = chain_same_first(x, y1), chain_same_second(x, y2)
        assert is_chain(x, c1, near_first) and (not c1 or c1[-1] == y1)
        assert is_chain(x, c2, near_second) and (not c2 or c2[-1] == y2)

    def test_grid_round_trip(self):
        x = random_atom(random.Random(11))
        assert from_grid(grid_of(x)) == x


class TestOracles:
    def test_identity(self):
        phi = AutomorphismOracle.from_permutation(tuple(range(N)))
        a = random_small(random.Random(12))
        A = random_large(random.Random(12))
        assert phi_small(phi, a) == a and phi_large(phi, A) == A

    def test_gamma_spots(self):
        rng = random.Random(13)
        for _ in range(20):
            alpha = random_perm(N, rng)
            phi = AutomorphismOracle.from_permutation(alpha, seed=1)
            a, A = random_small(rng), random_large(rng)
            assert phi_small(phi, a, rng=rng) == apply_partition(alpha, a)
            assert phi_large(phi, A, rng=rng) == apply_partition(alpha, A)

    def test_phi_req_order(self):
        rng = random.Random(14)
        R = phi_req(AutomorphismOracle.from_permutation(random_perm(N, rng)))
        assert check_order_preservation(R, 10, rng) == []

    def test_composition(self):
        rng = random.Random(15)
        alpha, beta = random_perm(N, rng), random_perm(N, rng)
        phi = AutomorphismOracle.from_permutation(alpha)
        psi = AutomorphismOracle.from_permutation(beta)
        both = phi_req(phi.then(psi))
        R_phi, R_psi = phi_req(phi), phi_req(psi)
        for _ in range(5):
            x = random_small(rng)
            assert both(x) == R_psi(R_phi(x))
        inv = phi_req(phi.inverted())
        x = random_large(rng)
        assert inv(R_phi(x)) == x

    def test_corrupted_first_spot(self):
        alpha = random_perm(N, random.Random(16))
        a = random_small(random.Random(17))
        bad = FactorPair(a, canonical_companion(a))
        other = random_perm(N, random.Random(18))

        def fn(x):
            return gamma_apply(other if x == bad else alpha, x)

        with pytest.raises(OracleError):
            phi_small(AutomorphismOracle(fn, probes=0), a, checks=2, rng=random.Random(0))

    def test_corrupted_orthogonality_probe(self):
        rng = random.Random(19)
        alpha, other = random_perm(N, rng), random_perm(N, rng)
        u, v, _ = atoms_of_block(random_block(N, 3, 3, rng))

        def fn(x):
            return gamma_apply(other if x == u else alpha, x)

        phi = AutomorphismOracle(fn, probes=64, seed=2)
        phi(v)
        with pytest.raises(OracleError):
            phi(u)

    def test_non_atom_image(self):
        phi = AutomorphismOracle(lambda x: x.complement(), probes=0)
        with pytest.raises(OracleError):
            phi(random_atom(random.Random(20)))

