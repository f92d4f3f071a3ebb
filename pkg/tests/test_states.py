"""Exact linear algebra, states and group-valued measures."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from factomp.exact import (
    ExactMatrix,
    bareiss_det,
    crt_symmetric,
    det_mod_p,
    hadamard_bound,
    rank_mod_p,
)
from factomp.fact_omp import build_fact
from factomp.states import (
    check_state,
    count_gfp_measures,
    count_group_measures,
    measure_nullity,
    measure_rows,
    solve_states,
    solve_states_27_local,
)

small_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def brute_nullity_mod_p(rows, p) -> int:
    n = len(rows[0])
    sols = sum(
        all(sum(a * x for a, x in zip(r, v)) % p == 0 for r in rows) for v in itertools.product(range(p), repeat=n)
    )
    k = 0
    while p**k < sols:
        k += 1
    assert p**k == sols
    return k


class TestExact:
    @given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)))
    @settings(max_examples=100, deadline=None)
    def test_bareiss_against_sympy(self, rows):
        d = bareiss_det(rows)
        assert d == sympy.Matrix(rows).det()
        assert abs(d) <= hadamard_bound(rows)

    @given(small_matrices)
    @settings(max_examples=100, deadline=None)
    def test_rank_against_sympy(self, rows):
        assert ExactMatrix(rows).rank() == sympy.Matrix(rows).rank()

    @given(small_matrices, st.sampled_from([2, 3]))
    @settings(max_examples=60, deadline=None)
    def test_rank_mod_p_brute_force(self, rows, p):
        assert len(rows[0]) - rank_mod_p(rows, p) == brute_nullity_mod_p(rows, p)

    @given(small_matrices, st.data())
    @settings(max_examples=100, deadline=None)
    def test_solve_satisfies_system(self, rows, data):
        rhs = data.draw(st.lists(st.integers(-5, 5), min_size=len(rows), max_size=len(rows)))
        sol = ExactMatrix(rows).solve(rhs)
        M = sympy.Matrix(rows)
        aug = M.row_join(sympy.Matrix(rhs))
        assert sol.consistent == (M.rank() == aug.rank())
        if sol.consistent:
            for r, b in zip(rows, rhs):
                assert sum(Fraction(a) * x for a, x in zip(r, sol.particular)) == b
            for v in sol.basis:
                assert all(sum(Fraction(a) * x for a, x in zip(r, v)) == 0 for r in rows)
            assert sol.nullity == len(rows[0]) - M.rank()

    def test_det_mod_p(self):
        rows = [[2, 1], [1, 1]]
        assert det_mod_p(rows, 7) == 1 and det_mod_p([[1, 1], [1, 1]], 7) == 0

    def test_crt(self):
        rng = random.Random(0)
        mods = [101, 103, 107]
        for _ in range(50):
            x = rng.randrange(-500000, 500000)
            assert crt_symmetric([x % m for m in mods], mods) == x

    def test_modulus_limit(self):
        with pytest.raises(ValueError):
            rank_mod_p([[1]], 1 << 31)

    def test_ragged_rows(self):
        with pytest.raises(ValueError):
            ExactMatrix([[1, 2], [3]])


class TestStates:
    def test_fact_v23_unique_third(self, fact_v23):
        sol = solve_states(fact_v23)
        assert sol.unique and sol.constant_value == Fraction(1, 3)
        assert check_state(fact_v23, sol.particular)

    def test_fact_v33_unique_third(self, fact_v33):
        sol = solve_states(fact_v33)
        assert sol.unique and sol.constant_value == Fraction(1, 3)

    def test_fact8_unique_third(self, fact8):
        sol = solve_states(fact8)
        assert sol.unique and sol.constant_value == Fraction(1, 3)

    @pytest.mark.parametrize("n,nullity", [(4, 3), (6, 60)])
    def test_mo_positive_nullity(self, n, nullity):
        sol = solve_states(build_fact(n, with_elements=False))
        assert sol.consistent and sol.nullity == nullity and sol.constant_value is None

    def test_check_state_rejects(self, fact_v23):
        assert not check_state(fact_v23, [Fraction(1, 2)] * 28)

    def test_local_27(self):
        rep = solve_states_27_local(samples=10, seed=1)
        assert rep.ok and rep.embedded == 10


class TestMeasures:
    def test_known_counts(self, fact_v23, fact_v33):
        assert count_gfp_measures(fact_v23, 2) == 512
        assert count_gfp_measures(fact_v23, 3) == 3
        assert count_gfp_measures(fact_v33, 3) == 19683

    @pytest.mark.parametrize("p", [2, 3])
    def test_mo3_brute_force(self, p):
        s = build_fact(4, with_elements=False)
        rows = measure_rows(s)
        assert measure_nullity(s, p) == brute_nullity_mod_p(rows, p) == 4

    def test_klein_group_measures(self, fact_v23):
        assert count_group_measures(fact_v23, [2, 2]) == 512**2

    def test_non_prime(self, fact_v23):
        with pytest.raises(ValueError):
            measure_nullity(fact_v23, 4)
