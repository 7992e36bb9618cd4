"""Exact field arithmetic, float interval scalars, and geometric predicates."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidlab.errors import (
    ConcentricCircles,
    MixedBackend,
    NegativeRadicand,
    NotRepresentable,
    UsageError,
)
from rigidlab.numeric import (
    DEFAULT_TOL,
    SQRT3,
    FloatVal,
    Point,
    QScalar,
    circle_intersect,
    compare_deviation,
    dist2,
    format_scalar,
    is_unit,
    parse_scalar,
    point_to_float,
    points_equal,
    sqrt_diff_within,
    sqrt_exact,
)

fracs = st.fractions(min_value=-10, max_value=10, max_denominator=8)
qscalars = st.builds(QScalar, fracs, fracs)


class TestQScalarField:
    @given(qscalars, qscalars, qscalars)
    def test_ring_axioms(self, u, v, w):
        assert (u + v) + w == u + (v + w)
        assert u + v == v + u
        assert (u * v) * w == u * (v * w)
        assert u * v == v * u
        assert u * (v + w) == u * v + u * w

    @given(qscalars)
    def test_additive_inverse(self, u):
        assert u + (-u) == QScalar(0)

    @given(qscalars)
    def test_multiplicative_inverse(self, u):
        if u == QScalar(0):
            with pytest.raises(ZeroDivisionError):
                QScalar(1) / u
        else:
            assert u * (QScalar(1) / u) == QScalar(1)

    def test_conjugate_product(self):
        assert QScalar(1, 1) * QScalar(1, -1) == QScalar(-2)

    def test_sqrt3_bounds(self):
        # 1.732 < sqrt(3) < 1.736
        assert SQRT3 > QScalar(Fraction(433, 250))
        assert SQRT3 < QScalar(Fraction(434, 250))
        assert SQRT3 * SQRT3 == QScalar(3)

    @given(qscalars)
    def test_sign_matches_float(self, u):
        f = u.to_float()
        if abs(f) > 1e-6:
            assert u.sign() == (1 if f > 0 else -1)

    @given(qscalars, qscalars)
    def test_ordering_consistent_with_difference(self, u, v):
        assert (u < v) == ((v - u).sign() == 1)

    @given(qscalars)
    def test_floor_ceil(self, u):
        fl, ce = u.__floor__(), u.__ceil__()
        assert QScalar(fl) <= u < QScalar(fl + 1)
        assert QScalar(ce - 1) < u <= QScalar(ce)

    def test_rejects_bare_float(self):
        with pytest.raises(MixedBackend):
            QScalar(0.5)

    def test_pow(self):
        assert QScalar(1, 1) ** 2 == QScalar(4, 2)
        assert QScalar(0, 1) ** -2 == QScalar(Fraction(1, 3))

    def test_hash_rational_matches_fraction(self):
        assert hash(QScalar(Fraction(3, 2))) == hash(Fraction(3, 2))


class TestSqrtExact:
    def test_frozen_values(self):
        assert sqrt_exact(QScalar(Fraction(3, 4))) == QScalar(0, Fraction(1, 2))
        assert sqrt_exact(QScalar(4)) == QScalar(2)
        assert sqrt_exact(QScalar(3)) == SQRT3
        assert sqrt_exact(QScalar(0)) == QScalar(0)
        # (1 + sqrt(3))^2 = 4 + 2 sqrt(3)
        assert sqrt_exact(QScalar(4, 2)) == QScalar(1, 1)

    def test_not_representable(self):
        with pytest.raises(NotRepresentable):
            sqrt_exact(QScalar(2))
        with pytest.raises(NotRepresentable):
            sqrt_exact(SQRT3)

    def test_negative(self):
        with pytest.raises(NegativeRadicand):
            sqrt_exact(QScalar(-1))

    @given(qscalars)
    def test_roundtrip_on_squares(self, u):
        r = sqrt_exact(u * u)
        assert r * r == u * u
        assert r.sign() >= 0


class TestFloatVal:
    def test_eq_within_tol(self):
        a = FloatVal(1.0, 1e-9)
        assert a == FloatVal(1.0 + 5e-10, 1e-9)
        assert a != FloatVal(1.1, 1e-9)

    def test_comparisons_respect_band(self):
        a = FloatVal(1.0, 1e-3)
        assert not (a < FloatVal(1.0005, 1e-3))
        assert a < FloatVal(1.01, 1e-3)
        assert a <= FloatVal(0.9995, 1e-3)

    def test_tol_propagates_as_max(self):
        c = FloatVal(1.0, 1e-9) + FloatVal(1.0, 1e-3)
        assert c.tol == 1e-3

    def test_mixing_backends_raises(self):
        with pytest.raises(MixedBackend):
            FloatVal(1.0) + QScalar(1)
        with pytest.raises(MixedBackend):
            QScalar(1) + FloatVal(1.0)

    def test_cross_backend_eq_is_false_not_error(self):
        assert (QScalar(1) == FloatVal(1.0)) is False

    def test_unhashable(self):
        with pytest.raises(TypeError):
            hash(FloatVal(1.0))


class TestParseFormat:
    @pytest.mark.parametrize("text,expect", [
        ("1", QScalar(1)),
        ("-2/3", QScalar(Fraction(-2, 3))),
        ("r3", SQRT3),
        ("-r3", QScalar(0, -1)),
        ("1/2+3/2r3", QScalar(Fraction(1, 2), Fraction(3, 2))),
        ("2-r3", QScalar(2, -1)),
        ("1.5", QScalar(Fraction(3, 2))),
        ("0", QScalar(0)),
    ])
    def test_parse(self, text, expect):
        assert parse_scalar(text) == expect

    @given(qscalars)
    def test_format_parse_roundtrip(self, u):
        assert parse_scalar(format_scalar(u)) == u

    def test_garbage(self):
        for bad in ("", "x", "1+r2", "1//2", "r3r3"):
            with pytest.raises(UsageError):
                parse_scalar(bad)


class TestPoint:
    def test_exact_construction(self):
        p = Point.exact("1/2", "r3")
        assert p.x == QScalar(Fraction(1, 2)) and p.y == SQRT3
        assert p.backend == "exact"

    def test_bare_float_coordinate_rejected(self):
        with pytest.raises(MixedBackend):
            Point(0.5, QScalar(1))

    def test_approx(self):
        p = Point.approx(0.5, 0.25)
        assert p.backend == "float"

    def test_mixed_coordinates_rejected(self):
        with pytest.raises(MixedBackend):
            Point(QScalar(1), FloatVal(1.0))

    def test_dist2_and_unit(self):
        a = Point(QScalar(0), QScalar(0))
        b = Point(QScalar(1), QScalar(0))
        assert dist2(a, b) == QScalar(1)
        assert is_unit(a, b)

    def test_float_unit_tolerance(self):
        a = Point.approx(0.0, 0.0)
        b = Point.approx(1.0 + 1e-12, 0.0)
        assert is_unit(a, b)

    def test_point_to_float(self):
        p = point_to_float(Point(QScalar(0), SQRT3))
        assert p.backend == "float"
        assert abs(p.y.value - math.sqrt(3)) < 1e-12


class TestCircleIntersect:
    def test_two_hits_exact(self):
        a = Point(QScalar(0), QScalar(0))
        b = Point(QScalar(1), QScalar(0))
        hits = circle_intersect(a, QScalar(1), b, QScalar(1))
        assert len(hits) == 2
        ys = sorted(h.y for h in hits)
        assert ys[0] == QScalar(0, Fraction(-1, 2))
        assert ys[1] == QScalar(0, Fraction(1, 2))

    def test_tangent(self):
        a = Point(QScalar(0), QScalar(0))
        b = Point(QScalar(2), QScalar(0))
        hits = circle_intersect(a, QScalar(1), b, QScalar(1))
        assert len(hits) == 1
        assert points_equal(hits[0], Point(QScalar(1), QScalar(0)))

    def test_disjoint(self):
        a = Point(QScalar(0), QScalar(0))
        b = Point(QScalar(4), QScalar(0))
        assert circle_intersect(a, QScalar(1), b, QScalar(1)) == ()

    def test_concentric(self):
        a = Point(QScalar(0), QScalar(0))
        with pytest.raises(ConcentricCircles):
            circle_intersect(a, QScalar(1), a, QScalar(1))

    def test_nonpositive_radius(self):
        a = Point(QScalar(0), QScalar(0))
        b = Point(QScalar(1), QScalar(0))
        with pytest.raises(ValueError):
            circle_intersect(a, QScalar(0), b, QScalar(1))

    @given(st.sampled_from([1, 3, 4]), st.integers(-3, 3), st.integers(-3, 3))
    def test_unit_circles_closed_at_lattice_gaps(self, d2, a, b):
        """Unit circles around points at squared distance 1, 3, or 4 always
        intersect inside the field; those gaps never leave it."""
        from rigidlab.plane import lattice_point, P0
        q = lattice_point(a, b)
        if dist2(P0, q) != QScalar(d2):
            return
        hits = circle_intersect(P0, QScalar(1), q, QScalar(1))
        assert len(hits) >= 1
        for h in hits:
            assert dist2(P0, h) == QScalar(1)

    def test_float_backend(self):
        a = Point.approx(0.0, 0.0)
        b = Point.approx(1.0, 0.0)
        hits = circle_intersect(a, FloatVal(1.0), b, FloatVal(1.0))
        assert len(hits) == 2

    def test_mixed_backend_rejected(self):
        a = Point.approx(0.0, 0.0)
        b = Point.approx(1.0, 0.0)
        with pytest.raises(MixedBackend):
            circle_intersect(a, QScalar(1), b, FloatVal(1.0))


class TestSqrtFreeComparisons:
    @given(st.integers(0, 40), st.integers(0, 40), st.integers(0, 8))
    def test_sqrt_diff_within_matches_float_oracle(self, a2, b2, e):
        got = sqrt_diff_within(QScalar(a2), QScalar(b2), QScalar(e))
        want = abs(math.sqrt(a2) - math.sqrt(b2)) <= e + 1e-12
        assert got == want

    def test_negative_epsilon(self):
        assert not sqrt_diff_within(QScalar(1), QScalar(1), QScalar(-1))

    @given(st.integers(0, 40), st.integers(0, 40), st.integers(0, 40))
    def test_compare_deviation_matches_float_oracle(self, a2, c2, b2):
        got = compare_deviation(QScalar(a2), QScalar(c2), QScalar(b2))
        da = abs(math.sqrt(a2) - math.sqrt(b2))
        dc = abs(math.sqrt(c2) - math.sqrt(b2))
        if abs(da - dc) < 1e-12:
            assert got == 0
        else:
            assert got == (-1 if da < dc else 1)
