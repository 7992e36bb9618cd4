"""Product structures, conflict edges, trilateration, and the two
witness constructions with their exhaustive verifier."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidlab.acceptance import _ball1_orientation_pair
from rigidlab.errors import InconsistentDistances
from rigidlab.numeric import FloatVal, Point, QScalar, dist2, points_equal
from rigidlab.phi import OrientationFamily, orientation_from_bits
from rigidlab.plane import P0, P1, P2, base_triangle, lattice_ball, lattice_point
from rigidlab.product import (
    build_product,
    find_conflict_edge,
    trilaterate,
    verify_product_witness,
    witness_case1,
    witness_case2,
)
from rigidlab.relations import WitnessSet

lattice_pts = st.builds(lattice_point, st.integers(-6, 6), st.integers(-6, 6))


class TestBuildProduct:
    def test_triangle_single_member(self):
        tri = base_triangle()
        P = build_product(tri, [orientation_from_bits(tri, 0)])
        assert P.structure.n == 3
        assert len(P.structure.pairs) == 5

    def test_two_member_fibers_disjoint(self):
        ps = lattice_ball(1)
        S = orientation_from_bits(ps, 0)
        Z = orientation_from_bits(ps, 5)
        P = build_product(ps, [S, Z])
        assert P.structure.n == 14
        assert len(P.structure.pairs) == len(S.pairs) + len(Z.pairs)
        for a, b in P.structure.pairs:
            assert P.fiber_of(a) == P.fiber_of(b)

    def test_element_decode_roundtrip(self):
        ps = lattice_ball(1)
        fam = OrientationFamily(
            ps, (orientation_from_bits(ps, 0), orientation_from_bits(ps, 1))
        )
        P = build_product(ps, fam)
        for s in range(2):
            for i in range(7):
                assert P.decode(P.element(i, s)) == (i, s)


class TestConflictEdge:
    def test_found_on_flipped_bit(self):
        ps = lattice_ball(1)
        S = orientation_from_bits(ps, 0)
        Z = orientation_from_bits(ps, 1)
        ce = find_conflict_edge(S, Z)
        assert ce is not None
        assert (ce.ui, ce.vi) != (ce.vi, ce.ui)
        assert (ce.ui, ce.vi) in S.pair_set
        assert (ce.vi, ce.ui) in Z.pair_set

    def test_none_when_identical(self):
        ps = lattice_ball(1)
        S = orientation_from_bits(ps, 3)
        assert find_conflict_edge(S, S) is None

    def test_canonical_ball1_pair(self):
        _, S, Z = _ball1_orientation_pair()
        ce = find_conflict_edge(S, Z)
        assert ce is not None and ce.ui != ce.vi


class TestTrilaterate:
    def test_frozen_value(self):
        q = trilaterate(QScalar(1), QScalar(1), QScalar(3))
        expect = Point(QScalar(Fraction(1, 2)), QScalar(0, Fraction(-1, 2)))
        assert points_equal(q, expect)

    def test_known_inconsistent(self):
        with pytest.raises(InconsistentDistances):
            trilaterate(QScalar(1), QScalar(9), QScalar(9))

    @given(lattice_pts)
    @settings(max_examples=100)
    def test_roundtrip(self, p):
        q = trilaterate(dist2(P0, p), dist2(P1, p), dist2(P2, p))
        assert points_equal(p, q)

    @given(lattice_pts)
    @settings(max_examples=40)
    def test_perturbed_rejected(self, p):
        # bumping the p2 distance by 1 would require y = sqrt(3)/6, which
        # no lattice point has
        with pytest.raises(InconsistentDistances):
            trilaterate(dist2(P0, p), dist2(P1, p), dist2(P2, p) + 1)

    def test_float_backend(self):
        p = Point.approx(0.25, 1.5)
        pf = [Point.approx(0.0, 0.0), Point.approx(1.0, 0.0),
              Point.approx(0.5, 3 ** 0.5 / 2)]
        q = trilaterate(dist2(pf[0], p), dist2(pf[1], p), dist2(pf[2], p))
        assert points_equal(p, q)


class TestCase1:
    @pytest.mark.parametrize("x,y,strategy", [
        (lattice_point(1, 0), Point(QScalar(5), QScalar(0)), "edge"),
        (lattice_point(2, 0), Point(QScalar(6), QScalar(0)), "ladder"),
        (lattice_point(1, 1), Point(QScalar(7), QScalar(0)), "rhombus"),
    ])
    def test_valid_witness(self, x, y, strategy):
        built = witness_case1(x, y)
        assert built.grow.strategy == strategy
        assert built.strict_exclusion
        verdict = verify_product_witness(built.product, built.witness)
        assert verdict.valid

    def test_witness_contains_x_not_required_to_contain_y(self):
        built = witness_case1(lattice_point(1, 0), Point(QScalar(5), QScalar(0)))
        assert built.src in built.witness.subset

    def test_same_point_rejected(self):
        with pytest.raises(ValueError):
            witness_case1(P0, P0)

    def test_verifier_rejects_gutted_witness(self):
        # the singleton {x} induces no pairs at all, so mapping x to y
        # preserves vacuously; the verifier must surface that counterexample
        built = witness_case1(lattice_point(1, 0), Point(QScalar(5), QScalar(0)))
        P = built.product
        xi = P.base.index_of(lattice_point(1, 0))
        yi = P.base.index_of(Point(QScalar(5), QScalar(0)))
        src, tgt = P.element(xi, 0), P.element(yi, 0)
        verdict = verify_product_witness(P, WitnessSet((src,), src, tgt))
        assert not verdict.valid
        assert verdict.counterexample[src] == tgt


class TestCase2:
    def test_valid_for_center_and_ring(self):
        ps, S, Z = _ball1_orientation_pair()
        i0, i1, _ = ps.triangle_indices()
        for x in (ps[i0], ps[i1]):
            built = witness_case2(x, S, Z)
            verdict = verify_product_witness(built.product, built.witness,
                                             enumerate_all=True)
            assert verdict.valid
            assert verdict.fiber_consistent

    def test_whole_fiber_fallback_reported(self):
        # the radius-1 ball is too small for strict in-fragment pinning;
        # construction must fall back and say so
        ps, S, Z = _ball1_orientation_pair()
        built = witness_case2(ps[0], S, Z)
        assert built.whole_fiber and not built.pinned
        assert len(built.witness.subset) == len(ps)

    def test_requires_membership(self):
        ps, S, Z = _ball1_orientation_pair()
        with pytest.raises(ValueError):
            witness_case2(lattice_point(5, 5), S, Z)

    def test_requires_conflict(self):
        ps, S, _ = _ball1_orientation_pair()
        with pytest.raises(ValueError):
            witness_case2(ps[0], S, S)

    def test_certificates_recorded(self):
        ps, S, Z = _ball1_orientation_pair()
        built = witness_case2(ps[0], S, Z)
        assert built.certificates
        for cert in built.certificates:
            assert cert.strategy in ("edge", "rhombus")
