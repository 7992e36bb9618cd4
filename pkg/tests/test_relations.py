"""Finite relational structures: hom search, rigidity, witness sets."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidlab.errors import BudgetExhausted, NoWitnessExists
from rigidlab.relations import (
    RelStruct,
    WitnessSet,
    brute_force_homs,
    check_witness,
    enumerate_homs,
    find_min_witness,
    is_rigid,
    remark1_check,
)


def random_struct(rng: random.Random, n_max: int = 4) -> RelStruct:
    n = rng.randint(1, n_max)
    pairs = tuple(
        (i, j) for i in range(n) for j in range(n) if rng.random() < 0.35
    )
    return RelStruct(n, pairs)


@st.composite
def structs(draw, n_max=4):
    n = draw(st.integers(1, n_max))
    pool = [(i, j) for i in range(n) for j in range(n)]
    pairs = draw(st.sets(st.sampled_from(pool)))
    return RelStruct(n, tuple(pairs))


class TestRelStruct:
    def test_pairs_sorted_and_deduped(self):
        s = RelStruct(3, ((2, 1), (0, 1), (2, 1)))
        assert s.pairs == ((0, 1), (2, 1))

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            RelStruct(2, ((0, 2),))

    def test_restrict(self):
        s = RelStruct(4, ((0, 1), (1, 2), (2, 3), (3, 0)))
        sub = s.restrict((1, 2, 3))
        assert sub.n == 3
        assert sub.pairs == ((0, 1), (1, 2))


class TestEnumerateHoms:
    def test_cycle3_endomorphisms(self):
        c3 = RelStruct(3, ((0, 1), (1, 2), (2, 0)))
        maps = enumerate_homs(c3, c3).maps
        assert maps == ((0, 1, 2), (1, 2, 0), (2, 0, 1))

    def test_pin_restricts(self):
        c3 = RelStruct(3, ((0, 1), (1, 2), (2, 0)))
        maps = enumerate_homs(c3, c3, pin={0: 1}).maps
        assert maps == ((1, 2, 0),)

    def test_limit_truncates(self):
        empty = RelStruct(3, ())
        res = enumerate_homs(empty, empty, limit=5)
        assert res.truncated and len(res.maps) == 5

    def test_empty_domain(self):
        res = enumerate_homs(RelStruct(0, ()), RelStruct(2, ()))
        assert res.maps == ((),)

    @given(structs(), structs())
    @settings(max_examples=150, deadline=None)
    def test_matches_brute_force(self, src, dst):
        fast = set(enumerate_homs(src, dst).maps)
        slow = set(brute_force_homs(src, dst))
        assert fast == slow

    @given(structs())
    @settings(max_examples=80, deadline=None)
    def test_identity_always_an_endomorphism(self, s):
        maps = enumerate_homs(s, s).maps
        assert tuple(range(s.n)) in maps


class TestRigid:
    def test_cycle_not_rigid(self):
        rep = is_rigid(RelStruct(3, ((0, 1), (1, 2), (2, 0))))
        assert not rep.rigid and rep.endo_count == 3

    def test_first_rigid_three_element_relation(self):
        """Scanning bitmasks over the nine ordered pairs in row-major order,
        the first rigid structure is mask 12: {(0,2), (1,0)}."""
        pool = [(i, j) for i in range(3) for j in range(3)]
        for mask in range(2 ** 9):
            pairs = tuple(pool[k] for k in range(9) if mask >> k & 1)
            if is_rigid(RelStruct(3, pairs)).rigid:
                assert mask == 12
                assert pairs == ((0, 2), (1, 0))
                return
        pytest.fail("no rigid relation found in the scan")

    def test_loop_forces_constant_endo(self):
        # a loop admits the constant map onto it, so never rigid for n >= 2
        s = RelStruct(2, ((0, 0),))
        rep = is_rigid(s)
        assert not rep.rigid


class TestWitness:
    def test_witness_set_requires_membership(self):
        with pytest.raises(ValueError):
            WitnessSet((0, 1), 2, 0)

    def test_check_witness_valid(self):
        s = RelStruct(3, ((0, 2), (1, 0)))
        res = check_witness(s, WitnessSet((0, 1, 2), 0, 1))
        assert res.valid

    def test_check_witness_counterexample(self):
        c3 = RelStruct(3, ((0, 1), (1, 2), (2, 0)))
        res = check_witness(c3, WitnessSet((0, 1, 2), 0, 1))
        assert not res.valid
        assert res.counterexample[0] == 1

    def test_find_min_witness_on_rigid(self):
        s = RelStruct(3, ((0, 2), (1, 0)))
        for x in range(3):
            for y in range(3):
                if x == y:
                    continue
                res = find_min_witness(s, x, y)
                assert res.minimal
                assert check_witness(s, res.witness).valid

    def test_no_witness_exists(self):
        c3 = RelStruct(3, ((0, 1), (1, 2), (2, 0)))
        with pytest.raises(NoWitnessExists):
            find_min_witness(c3, 0, 1)

    def test_budget_exhausted_carries_partial(self):
        s = RelStruct(4, ((0, 2), (1, 0), (2, 3)))
        try:
            find_min_witness(s, 0, 1, budget=1)
        except BudgetExhausted as exc:
            assert exc.partial is not None
        else:
            # tiny budgets may still finish on small structures; then the
            # witness must at least verify
            res = find_min_witness(s, 0, 1, budget=1)
            assert check_witness(s, res.witness).valid

    def test_same_element_rejected(self):
        with pytest.raises(ValueError):
            find_min_witness(RelStruct(2, ()), 1, 1)


class TestRemark1:
    @given(structs())
    @settings(max_examples=100, deadline=None)
    def test_all_witnessed_implies_rigid(self, s):
        rep = remark1_check(s)
        if rep.all_pairs_witnessed:
            assert rep.rigid

    def test_reports_unwitnessed_pairs(self):
        c3 = RelStruct(3, ((0, 1), (1, 2), (2, 0)))
        rep = remark1_check(c3)
        assert not rep.all_pairs_witnessed
        assert (0, 1) in rep.unwitnessed_pairs
