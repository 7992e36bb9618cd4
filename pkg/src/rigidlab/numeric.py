"""Scalar kernels and the plane primitives every other module builds on.

Two numeric backends coexist and never mix silently:

* ``QScalar``: numbers of the form a + b*sqrt(3) with rational a, b.
  Arithmetic, comparisons and (when possible) square roots are exact.
* ``FloatVal``: a double paired with an absolute tolerance ``tol``.
  Comparisons are tolerance-aware; arithmetic keeps the larger tolerance.

Plain ``int`` and ``Fraction`` values are backend-neutral constants and
combine with either side.  Combining a QScalar with a float or FloatVal
raises MixedBackend instead of degrading precision.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ConcentricCircles,
    MixedBackend,
    NegativeRadicand,
    NotRepresentable,
    UsageError,
)

DEFAULT_TOL = 1e-9

_EXACT_COERCIBLE = (int, Fraction)


def _fraction_sqrt(f: Fraction):
    """Exact square root of a nonnegative rational, or None if irrational."""
    if f < 0:
        return None
    num = math.isqrt(f.numerator)
    if num * num != f.numerator:
        return None
    den = math.isqrt(f.denominator)
    if den * den != f.denominator:
        return None
    return Fraction(num, den)


class QScalar:
    """Element a + b*sqrt(3) of the real quadratic field Q(sqrt(3)).

    Immutable by convention; both coefficients are ``Fraction`` values,
    which keeps them in lowest terms with positive denominator.  Equality
    is exact coefficient equality, ordering is the true ordering of the
    real values, decided without any floating point.
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        if isinstance(a, float) or isinstance(b, float):
            raise MixedBackend("QScalar coefficients must be rational, not float")
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _coerce(other):
        if isinstance(other, QScalar):
            return other
        if isinstance(other, _EXACT_COERCIBLE):
            return QScalar(other)
        if isinstance(other, (FloatVal, float)):
            raise MixedBackend("cannot mix exact and float scalars")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QScalar(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QScalar(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QScalar(o.a - self.a, o.b - self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QScalar(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.a == 0 and o.b == 0:
            raise ZeroDivisionError("division by zero QScalar")
        # field norm a^2 - 3 b^2 vanishes only at zero since sqrt(3) is irrational
        n = o.a * o.a - 3 * o.b * o.b
        return self * QScalar(o.a / n, -o.b / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return 1 / (self ** (-exponent))
        out = QScalar(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __neg__(self):
        return QScalar(-self.a, -self.b)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(3): -1, 0 or 1."""
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # mixed signs: |a| vs |b|*sqrt(3) decided by squaring, still exact
        lhs = a * a
        rhs = 3 * b * b
        if a > 0:
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1

    def _cmp(self, other):
        o = self._coerce(other)
        if o is None:
            return None
        return (self - o).sign()

    def __eq__(self, other):
        if isinstance(other, QScalar):
            return self.a == other.a and self.b == other.b
        if isinstance(other, _EXACT_COERCIBLE):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __lt__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c < 0

    def __le__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return self.to_float()

    def to_float(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(3.0)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __floor__(self) -> int:
        est = math.floor(self.to_float())
        # the float estimate can be off near integers; repair exactly
        while (self - QScalar(est + 1)).sign() >= 0:
            est += 1
        while (self - QScalar(est)).sign() < 0:
            est -= 1
        return est

    def __ceil__(self) -> int:
        return -((-self).__floor__())

    def __repr__(self):
        return f"QScalar({self.a}, {self.b})"

    def __str__(self):
        return format_scalar(self)


SQRT3 = QScalar(0, 1)


def sqrt_exact(u) -> QScalar:
    """Exact square root within Q(sqrt(3)).

    Returns s >= 0 with s*s == u.  Raises NegativeRadicand for u < 0 and
    NotRepresentable when the root exists in the reals but not in the
    field, which is the caller's cue to fall back to the float backend.
    """
    if isinstance(u, (FloatVal, float)):
        raise MixedBackend("sqrt_exact is exact-backend only")
    if not isinstance(u, QScalar):
        u = QScalar(u)
    sg = u.sign()
    if sg < 0:
        raise NegativeRadicand(f"square root of negative value {u}")
    if sg == 0:
        return QScalar(0)
    a, b = u.a, u.b
    if b == 0:
        r = _fraction_sqrt(a)
        if r is not None:
            return QScalar(r)
        r = _fraction_sqrt(a / 3)
        if r is not None:
            return QScalar(0, r)
        raise NotRepresentable(f"sqrt({u}) is not in Q(sqrt(3))")
    # solve (c + d*sqrt(3))^2 = a + b*sqrt(3): c^2 + 3 d^2 = a and 2 c d = b,
    # so (c^2 - 3 d^2)^2 = a^2 - 3 b^2 must be a rational square
    norm = a * a - 3 * b * b
    if norm < 0:
        raise NotRepresentable(f"sqrt({u}) is not in Q(sqrt(3))")
    e = _fraction_sqrt(norm)
    if e is None:
        raise NotRepresentable(f"sqrt({u}) is not in Q(sqrt(3))")
    for c2 in ((a + e) / 2, (a - e) / 2):
        if c2 <= 0:
            continue
        c = _fraction_sqrt(c2)
        if c is None:
            continue
        d = b / (2 * c)
        cand = QScalar(c, d)
        if cand * cand == u:
            return cand if cand.sign() > 0 else -cand
    raise NotRepresentable(f"sqrt({u}) is not in Q(sqrt(3))")


class FloatVal:
    """Double-precision value with an absolute comparison tolerance.

    Two FloatVals are equal when their values differ by at most the larger
    of the two tolerances; orderings are strict beyond that band.  The type
    is deliberately unhashable: tolerance equality is not transitive, so
    hashing would be unsound.
    """

    __slots__ = ("value", "tol")

    def __init__(self, value, tol=DEFAULT_TOL):
        self.value = float(value)
        self.tol = float(tol)

    def _coerce(self, other):
        if isinstance(other, FloatVal):
            return other
        if isinstance(other, (int, float, Fraction)):
            return FloatVal(float(other), self.tol)
        if isinstance(other, QScalar):
            raise MixedBackend("cannot mix exact and float scalars")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatVal(self.value + o.value, max(self.tol, o.tol))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatVal(self.value - o.value, max(self.tol, o.tol))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatVal(o.value - self.value, max(self.tol, o.tol))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatVal(self.value * o.value, max(self.tol, o.tol))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatVal(self.value / o.value, max(self.tol, o.tol))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatVal(o.value / self.value, max(self.tol, o.tol))

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        return FloatVal(self.value ** exponent, self.tol)

    def __neg__(self):
        return FloatVal(-self.value, self.tol)

    def __abs__(self):
        return FloatVal(abs(self.value), self.tol)

    def sign(self) -> int:
        if abs(self.value) <= self.tol:
            return 0
        return 1 if self.value > 0 else -1

    def _diff(self, other):
        o = self._coerce(other)
        if o is None:
            return None
        return self.value - o.value, max(self.tol, o.tol)

    def __eq__(self, other):
        if isinstance(other, QScalar):
            return NotImplemented
        d = self._diff(other)
        if d is None:
            return NotImplemented
        return abs(d[0]) <= d[1]

    __hash__ = None

    def __lt__(self, other):
        d = self._diff(other)
        if d is None:
            return NotImplemented
        return d[0] < -d[1]

    def __le__(self, other):
        d = self._diff(other)
        if d is None:
            return NotImplemented
        return d[0] <= d[1]

    def __gt__(self, other):
        d = self._diff(other)
        if d is None:
            return NotImplemented
        return d[0] > d[1]

    def __ge__(self, other):
        d = self._diff(other)
        if d is None:
            return NotImplemented
        return d[0] >= -d[1]

    def __bool__(self):
        return self.sign() != 0

    def __float__(self):
        return self.value

    def __repr__(self):
        return f"FloatVal({self.value!r}, tol={self.tol!r})"


def backend_of(s) -> str:
    """Classify a scalar as 'exact' or 'float'."""
    if isinstance(s, (QScalar, *_EXACT_COERCIBLE)):
        return "exact"
    if isinstance(s, (FloatVal, float)):
        return "float"
    raise TypeError(f"not a scalar: {s!r}")


def scalar_sign(s) -> int:
    if isinstance(s, (QScalar, FloatVal)):
        return s.sign()
    if isinstance(s, _EXACT_COERCIBLE):
        return (s > 0) - (s < 0)
    raise TypeError(f"not a scalar: {s!r}")


def as_float(s) -> float:
    return float(s)


def sqrt_value(s2, tol=DEFAULT_TOL):
    """Length from a squared length; exact when the field permits.

    Intended for report fields only.  Certification decisions go through
    sqrt_diff_within / compare_deviation, which never take square roots.
    """
    if isinstance(s2, FloatVal):
        if s2.value < 0 and s2.sign() < 0:
            raise NegativeRadicand(f"square root of negative value {s2!r}")
        return FloatVal(math.sqrt(max(s2.value, 0.0)), max(tol, s2.tol))
    if isinstance(s2, float):
        return sqrt_value(FloatVal(s2, tol), tol)
    try:
        return sqrt_exact(s2)
    except NotRepresentable:
        return FloatVal(math.sqrt(QScalar._coerce(s2).to_float()), tol)


def deviation_value(a2, b2, tol=DEFAULT_TOL):
    """|sqrt(a2) - sqrt(b2)| as a reportable scalar, exact when possible."""
    sa = sqrt_value(a2, tol)
    sb = sqrt_value(b2, tol)
    if isinstance(sa, QScalar) and isinstance(sb, QScalar):
        return abs(sa - sb)
    return FloatVal(abs(float(sa) - float(sb)), tol)


def sqrt_diff_within(a2, b2, eps) -> bool:
    """Decide |sqrt(a2) - sqrt(b2)| <= eps using only ring operations.

    a2 and b2 are squared lengths (nonnegative), eps a plain scalar of the
    same backend.  Squaring twice keeps the exact backend inside the field
    even when the individual lengths have no exact square root.
    """
    if scalar_sign(eps) < 0:
        return False
    lhs = a2 + b2 - eps * eps
    # |sqrt a - sqrt b| <= e  <=>  a + b - e^2 <= 2*sqrt(a*b)
    if scalar_sign(lhs) <= 0:
        return True
    return scalar_sign(lhs * lhs - 4 * (a2 * b2)) <= 0


def compare_deviation(a2, c2, b2) -> int:
    """Order |sqrt(a2)-sqrt(b2)| against |sqrt(c2)-sqrt(b2)|.

    Returns -1, 0 or 1.  Tracks the largest deviation from a fixed base
    squared length b2 without computing square roots.
    """
    sa = scalar_sign(a2 - b2)
    sc = scalar_sign(c2 - b2)
    if sa == 0 and sc == 0:
        return 0
    if sa == 0:
        return -1
    if sc == 0:
        return 1
    if sa == sc:
        d = scalar_sign(a2 - c2)
        return d if sa > 0 else -d
    if sa > 0:
        return _compare_mixed(a2, c2, b2)
    return -_compare_mixed(c2, a2, b2)


def _compare_mixed(hi2, lo2, b2) -> int:
    # hi2 > b2 > lo2: compare sqrt(hi2)+sqrt(lo2) against 2*sqrt(b2),
    # squaring once more to stay in the ring
    m = 4 * b2 - hi2 - lo2
    if scalar_sign(m) < 0:
        return 1
    return scalar_sign(4 * (hi2 * lo2) - m * m)


@dataclass(frozen=True)
class Point:
    """Plane point; both coordinates must share one backend."""

    x: object
    y: object

    def __post_init__(self):
        object.__setattr__(self, "x", _normalize_coord(self.x))
        object.__setattr__(self, "y", _normalize_coord(self.y))
        if backend_of(self.x) != backend_of(self.y):
            raise MixedBackend("point coordinates use different backends")

    @classmethod
    def exact(cls, x, y) -> "Point":
        return cls(QScalar._coerce(x) if not isinstance(x, str) else parse_scalar(x),
                   QScalar._coerce(y) if not isinstance(y, str) else parse_scalar(y))

    @classmethod
    def approx(cls, x: float, y: float, tol: float = DEFAULT_TOL) -> "Point":
        return cls(FloatVal(x, tol), FloatVal(y, tol))

    @property
    def backend(self) -> str:
        return backend_of(self.x)

    def to_float_pair(self) -> tuple:
        return (float(self.x), float(self.y))

    def __repr__(self):
        if self.backend == "exact":
            return f"Point({self.x}, {self.y})"
        return f"Point({self.x.value:.6g}, {self.y.value:.6g})"


def _normalize_coord(v):
    if isinstance(v, _EXACT_COERCIBLE):
        return QScalar(v)
    if isinstance(v, (QScalar, FloatVal)):
        return v
    if isinstance(v, float):
        raise MixedBackend("bare float coordinate: wrap it in FloatVal or use Point.approx")
    raise TypeError(f"not a coordinate: {v!r}")


def point_to_float(p: Point, tol: float = DEFAULT_TOL) -> Point:
    """Down-convert a point to the float backend (identity if already float)."""
    if p.backend == "float":
        return p
    return Point(FloatVal(p.x.to_float(), tol), FloatVal(p.y.to_float(), tol))


def dist2(p: Point, q: Point):
    """Exact (or tolerance-tracked) squared Euclidean distance."""
    dx = p.x - q.x
    dy = p.y - q.y
    return dx * dx + dy * dy


def is_unit(p: Point, q: Point) -> bool:
    """True when |p - q| = 1, compared on the squared distance."""
    return dist2(p, q) == 1


def points_equal(p: Point, q: Point) -> bool:
    return p.x == q.x and p.y == q.y


def lex_less(p: Point, q: Point) -> bool:
    """Strict lexicographic (x, y) order; raw values on the float backend."""
    if p.backend == "exact" and q.backend == "exact":
        if p.x != q.x:
            return p.x < q.x
        return p.y < q.y
    px, py = p.to_float_pair()
    qx, qy = q.to_float_pair()
    return (px, py) < (qx, qy)


def _sqrt_backend(s2):
    if isinstance(s2, FloatVal):
        return FloatVal(math.sqrt(max(s2.value, 0.0)), s2.tol)
    return sqrt_exact(s2)


def _coerce_radius(r, backend: str, tol: float):
    if backend == "exact":
        c = QScalar._coerce(r)
        if c is None:
            raise MixedBackend("exact circle with non-exact radius")
        return c
    if isinstance(r, FloatVal):
        return r
    if isinstance(r, QScalar):
        raise MixedBackend("float circle with exact radius")
    return FloatVal(float(r), tol)


def circle_intersect(c1: Point, r1sq, c2: Point, r2sq) -> tuple:
    """Intersection points of two circles given by center and squared radius.

    Returns a tuple of 0, 1 or 2 points, lexicographically ordered.  A
    single point means tangency; on the float backend near-tangency within
    tol snaps to one point.  Raises ConcentricCircles for equal centers and
    NotRepresentable when the exact result leaves Q(sqrt(3)).
    """
    if c1.backend != c2.backend:
        raise MixedBackend("circle centers use different backends")
    backend = c1.backend
    tol = c1.x.tol if backend == "float" else DEFAULT_TOL
    r1sq = _coerce_radius(r1sq, backend, tol)
    r2sq = _coerce_radius(r2sq, backend, tol)
    if scalar_sign(r1sq) <= 0 or scalar_sign(r2sq) <= 0:
        raise ValueError("circle radii must be positive")
    dx = c2.x - c1.x
    dy = c2.y - c1.y
    d2 = dx * dx + dy * dy
    if scalar_sign(d2) == 0:
        raise ConcentricCircles("circle centers coincide")
    # parameter along the center line, then squared perpendicular offset
    t = (d2 + r1sq - r2sq) / (2 * d2)
    s2 = r1sq / d2 - t * t
    ss = scalar_sign(s2)
    if ss < 0:
        return ()
    bx = c1.x + t * dx
    by = c1.y + t * dy
    if ss == 0:
        return (Point(bx, by),)
    s = _sqrt_backend(s2)
    ox = -(dy * s)
    oy = dx * s
    pa = Point(bx + ox, by + oy)
    pb = Point(bx - ox, by - oy)
    if lex_less(pb, pa):
        pa, pb = pb, pa
    return (pa, pb)


_TERM_RE = re.compile(r"[+-]?[^+-]+")


def parse_scalar(token: str) -> QScalar:
    """Parse tokens like '3', '-3/2', 'r3', '1/2r3' or '3/2+1/2r3'.

    'r3' denotes sqrt(3).  Decimal literals such as '1.5' are accepted and
    read exactly as rationals.
    """
    s = token.replace(" ", "")
    if not s:
        raise UsageError("empty scalar token")
    terms = _TERM_RE.findall(s)
    if "".join(terms) != s:
        raise UsageError(f"cannot parse scalar token {token!r}")
    a = Fraction(0)
    b = Fraction(0)
    for term in terms:
        target_b = term.endswith("r3")
        body = term[:-2] if target_b else term
        body = body.rstrip("*")
        if body in ("", "+"):
            coeff = Fraction(1)
        elif body == "-":
            coeff = Fraction(-1)
        else:
            try:
                coeff = Fraction(body)
            except (ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"cannot parse scalar token {token!r}") from exc
        if target_b:
            b += coeff
        else:
            a += coeff
    return QScalar(a, b)


def format_scalar(q: QScalar) -> str:
    """Inverse of parse_scalar for exact scalars."""
    if q.b == 0:
        return str(q.a)
    if q.b == 1:
        rad = "r3"
    elif q.b == -1:
        rad = "-r3"
    else:
        rad = f"{q.b}r3"
    if q.a == 0:
        return rad
    joiner = "+" if not rad.startswith("-") else ""
    return f"{q.a}{joiner}{rad}"
