"""Finite fields, subspaces and the complementary-subspace OMP."""

from __future__ import annotations

import itertools

import pytest

from factomp import counting
from factomp.fact_omp import horizontal_sum_decomposition, leq, verify_omp
from factomp.states import random_block
from factomp.vecfact import (
    FiniteField,
    Subspace,
    SubspacePair,
    coset_embedding,
    enumerate_subspaces,
    fact_v_structure,
    field,
    gaussian_binomial,
    order_and_orthogonality,
    parse_subspace,
    standard_labeling,
)
from factomp.fact_omp import subalgebra_from_linear_structure
from factomp.states import block_labeling


class TestFields:
    @pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
    def test_axioms_and_inverses(self, q):
        F = field(q)
        for a in range(1, q):
            assert F.mul[a, F.inv[a]] == 1
        for a in range(q):
            assert F.add[a, F.neg[a]] == 0

    def test_gf4_is_not_z4(self):
        F = field(4)
        assert all(F.add[a, a] == 0 for a in range(4))
        assert sorted(F.mul[a, b] for a in range(1, 4) for b in range(1, 4)).count(0) == 0

    def test_no_table_for_six(self):
        with pytest.raises(ValueError):
            FiniteField(6)


class TestSubspaces:
    @pytest.mark.parametrize("q,k", [(2, 3), (3, 3), (2, 4), (4, 2), (5, 2)])
    def test_gaussian_binomials(self, q, k):
        for d in range(k + 1):
            subs = list(enumerate_subspaces(q, k, d))
            assert len(subs) == len(set(subs)) == gaussian_binomial(q, k, d)
            assert all(S.dim == d and len(S.vectors) == q**d for S in subs)

    def test_text_round_trip(self):
        for S in enumerate_subspaces(3, 3, 2):
            assert parse_subspace(3, str(S)) == S
        assert str(parse_subspace(2, "000")) == "000"
        assert str(parse_subspace(2, "110;011")) == "101;011"

    def test_sum_and_meet(self):
        F = field(2)
        x = Subspace(F, 3, [(1, 0, 0)])
        y = Subspace(F, 3, [(0, 1, 0)])
        assert x.sum(y).dim == 2 and x.meet_dim(y) == 0 and x <= x.sum(y)


class TestFactV:
    @pytest.mark.parametrize("q,k", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (5, 2)])
    def test_counts(self, q, k):
        s = fact_v_structure(q, k)
        a, b, per = s.incidence_counts()
        assert a == counting.cf_vec_atoms(q, k)
        assert b == counting.cf_vec_blocks(q, k)
        assert per == {counting.cf_vec_blocks_per_atom(q, k)}

    def test_examples(self, fact_v23, fact_v33):
        assert fact_v23.incidence_counts() == (28, 28, {3})
        assert fact_v33.incidence_counts() == (117, 234, {6})

    def test_axioms(self, fact_v23):
        assert verify_omp(fact_v23).ok

    def test_connected(self, fact_v33):
        assert len(horizontal_sum_decomposition(fact_v33).components) == 1

    def test_order_by_inclusion(self, fact_v23):
        els = fact_v23.elements
        for x, y in itertools.product(els[::5], repeat=2):
            le, perp = order_and_orthogonality(x, y)
            assert le == (x.first.vectors <= y.first.vectors and y.second.vectors <= x.second.vectors)
            assert perp == order_and_orthogonality(x, y.complement())[0]

    def test_pairs_are_complementary(self, fact_v33):
        assert all(e.is_valid() for e in fact_v33.elements)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            fact_v_structure(3, 3, size_cap=10)


class TestCosetEmbedding:
    def test_order_embedding(self, fact_v23):
        emb = coset_embedding(2, 3, standard_labeling(2, 3))
        els = fact_v23.elements
        images = [emb(e) for e in els]
        assert len(set(images)) == len(els)
        for i, j in itertools.product(range(0, len(els), 3), repeat=2):
            assert order_and_orthogonality(els[i], els[j])[0] == leq(images[i], images[j])

    def test_linear_substructure_is_a_summand(self, fact8):
        import random

        hs = horizontal_sum_decomposition(fact8)
        block = random_block(8, 2, 3, random.Random(4))
        sub = subalgebra_from_linear_structure(block_labeling(block), 2, 3)
        ids = sorted(fact8.atom_index[a] for a in sub.atoms)
        assert any(ids == c.atoms for c in hs.components)

    def test_bad_labeling(self):
        with pytest.raises(ValueError):
            coset_embedding(2, 2, [(0, 0), (0, 0), (1, 0), (1, 1)])

    def test_pair_complement(self):
        F = field(2)
        x = SubspacePair(Subspace(F, 2, [(1, 0)]), Subspace(F, 2, [(0, 1)]))
        assert x.complement().complement() == x
