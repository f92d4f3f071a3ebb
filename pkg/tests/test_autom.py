"""Point actions, phase groups, automorphism orders and canonical certificates."""

from __future__ import annotations

import random
from math import factorial

import networkx as nx
import pytest
from networkx.algorithms.isomorphism import GraphMatcher

from factomp.autom import (
    aut_order,
    block_transporter,
    compose,
    count_incidence_automorphisms,
    gamma_apply,
    gamma_image_order,
    identity,
    inverse,
    is_atom_automorphism,
    order_of_wreath,
    phase_group,
    random_perm,
    transports_block,
)
from factomp.canon import certify
from factomp.fact_omp import build_fact, enumerate_blocks, leq, orthogonal


def incidence_graph(natoms: int, blocks) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(natoms), side=0)
    g.add_nodes_from((natoms + j for j in range(len(blocks))), side=1)
    g.add_edges_from((a, natoms + j) for j, b in enumerate(blocks) for a in b)
    return g


def networkx_aut_count(natoms: int, blocks) -> int:
    g = incidence_graph(natoms, blocks)
    gm = GraphMatcher(g, g, node_match=lambda u, v: u["side"] == v["side"])
    return sum(1 for _ in gm.isomorphisms_iter())


def is_klein(group) -> bool:
    e = identity(len(group[0]))
    return len(group) == 4 and all(compose(g, g) == e for g in group)


class TestPermutations:
    def test_inverse_and_compose(self):
        rng = random.Random(0)
        for _ in range(50):
            a = random_perm(9, rng)
            assert compose(a, inverse(a)) == identity(9)

    def test_gamma_is_an_action(self, fact8):
        rng = random.Random(1)
        for _ in range(20):
            a, b = random_perm(8, rng), random_perm(8, rng)
            x = rng.choice(fact8.atoms)
            assert gamma_apply(compose(a, b), x) == gamma_apply(a, gamma_apply(b, x))

    def test_gamma_preserves_order(self, fact8):
        rng = random.Random(2)
        alpha = random_perm(8, rng)
        for _ in range(300):
            x, y = rng.choice(fact8.atoms), rng.choice(fact8.atoms)
            gx, gy = gamma_apply(alpha, x), gamma_apply(alpha, y)
            assert orthogonal(x, y) == orthogonal(gx, gy) and leq(x, y) == leq(gx, gy)

    def test_gamma_gives_incidence_automorphism(self, fact8):
        alpha = random_perm(8, random.Random(3))
        mapping = [fact8.atom_index[gamma_apply(alpha, a)] for a in fact8.atoms]
        assert is_atom_automorphism(fact8, mapping)
        broken = mapping[:]
        broken[0], broken[1] = broken[1], broken[0]
        assert not is_atom_automorphism(fact8, broken)


class TestPhaseGroups:
    @pytest.mark.parametrize("n", [2, 3, 5, 7])
    def test_prime_sizes_full(self, n):
        assert len(phase_group(n)) == factorial(n)

    def test_size_four_klein(self):
        assert is_klein(phase_group(4))

    @pytest.mark.parametrize("n", [6, 8])
    def test_trivial(self, n):
        assert phase_group(n) == [identity(n)]

    def test_cap(self):
        with pytest.raises(ValueError):
            phase_group(10)


class TestAutomorphismOrders:
    def test_mo3(self):
        s = build_fact(4, with_elements=False)
        assert aut_order(s) == 48 == networkx_aut_count(len(s.atoms), s.blocks)

    def test_fact_v23(self, fact_v23):
        assert aut_order(fact_v23) == 336 == networkx_aut_count(len(fact_v23.atoms), fact_v23.blocks)

    def test_fact8(self, fact8):
        assert aut_order(fact8) == 336**30 * factorial(30) == order_of_wreath(336, 30)

    def test_gamma_not_onto(self, fact8):
        assert gamma_image_order(4, 4) < 48
        assert gamma_image_order(8, 1) < aut_order(fact8)

    def test_backtracker_on_cycle(self):
        # blocks of size 2 on a 5-cycle: the dihedral group of order 10
        blocks = [(i, (i + 1) % 5) for i in range(5)]
        assert count_incidence_automorphisms(5, blocks) == 10 == networkx_aut_count(5, blocks)


class TestCertificates:
    def test_relabelling_invariant(self, fact_v23):
        rng = random.Random(5)
        n = len(fact_v23.atoms)
        base = certify(n, fact_v23.blocks)
        for _ in range(3):
            p = list(range(n))
            rng.shuffle(p)
            blocks = [tuple(p[a] for a in b) for b in fact_v23.blocks]
            rng.shuffle(blocks)
            c = certify(n, blocks)
            assert c.code == base.code and c.automorphisms == base.automorphisms == 336

    def test_distinguishes_structures(self):
        path = certify(4, [(0, 1), (1, 2), (2, 3)])
        star = certify(4, [(0, 1), (0, 2), (0, 3)])
        assert path.code != star.code


class TestTransporter:
    def test_maps_block_to_block(self):
        rng = random.Random(6)
        blocks = list(enumerate_blocks(8))
        for _ in range(20):
            b1, b2 = rng.choice(blocks), rng.choice(blocks)
            seq = rng.sample(range(3), 3)
            alpha = block_transporter(b1, b2, seq)
            assert sorted(alpha) == list(range(8))
            assert transports_block(alpha, b1, b2, seq)

    def test_rejects_mismatch(self):
        b1 = next(enumerate_blocks(8))
        with pytest.raises(ValueError):
            block_transporter(b1, b1[:2])
