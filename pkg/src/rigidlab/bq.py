"""Enumeration of unit-distance-preserving maps of finite plane sets, with
distance-deviation certificates and a gadget library.

A point set is enumerable when it admits a placement order: a sequence
starting at a unit edge in which every later point sees at least two
already-placed unit neighbors.  Placing a point then means intersecting
the unit circles of two anchor images and pruning candidates against all
other placed neighbors.  Maps are produced modulo isometry by fixing the
first edge at (0,0)-(1,0) and forcing the first off-axis image to the
upper half plane; the deviation bound being isometry-invariant justifies
the quotient.

Sets without such an order (long chains, or denser graphs whose minimum
degree exceeds what an order can accommodate) are refused via NotAnchored
rather than under-enumerated: a certificate from a partial enumeration
would be unsound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BudgetExhausted,
    NotAnchored,
    NotRepresentable,
)
from .numeric import (
    DEFAULT_TOL,
    FloatVal,
    Point,
    QScalar,
    circle_intersect,
    compare_deviation,
    deviation_value,
    dist2,
    is_unit,
    points_equal,
    scalar_sign,
    sqrt_diff_within,
    sqrt_exact,
    sqrt_value,
)
from .plane import P0, P1, PointSet, is_connected, unit_graph, unit_path

DEFAULT_BRANCH_LIMIT = 500_000


@dataclass(frozen=True)
class PlacementOrder:
    """Vertex order plus, per position, the placed unit neighbors."""

    order: tuple
    anchors: tuple  # anchors[k] = original indices placed before order[k]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "anchors", tuple(tuple(a) for a in self.anchors))
        if len(self.order) != len(set(self.order)):
            raise ValueError("placement order repeats a vertex")
        if len(self.anchors) != len(self.order):
            raise ValueError("anchors must align with the order")
        for k, anchor in enumerate(self.anchors):
            placed = set(self.order[:k])
            if any(a not in placed for a in anchor):
                raise ValueError("anchor not placed before its vertex")
            if k >= 2 and len(anchor) < 2:
                raise ValueError("late vertices need at least two anchors")


def placement_order(T: PointSet, x=None, y=None) -> PlacementOrder:
    """Greedy placement order over every possible starting unit edge.

    Greedy per start edge is complete: a vertex that is placeable stays
    placeable as the placed set grows, so if any completing order starts
    at some edge, the greedy run from that edge cannot stall.  Trying all
    edges therefore decides existence outright; failure raises NotAnchored.
    """
    n = len(T)
    for p in (x, y):
        if p is not None and not isinstance(p, int) and T.index_of(p) < 0:
            raise ValueError("x and y must belong to the point set")
    if n == 0:
        raise ValueError("empty point set")
    if n == 1:
        return PlacementOrder((0,), ((),))
    g = unit_graph(T)
    if not is_connected(g):
        raise NotAnchored("unit graph is disconnected; no placement order exists")
    adj = g.adjacency()
    for i, j in g.edges:
        for start in ((i, j), (j, i)):
            placed = list(start)
            placed_set = set(start)
            anchors = [(), ()]
            while len(placed) < n:
                best = -1
                best_count = 1
                for v in range(n):
                    if v in placed_set:
                        continue
                    count = sum(1 for w in adj[v] if w in placed_set)
                    if count > best_count:
                        best, best_count = v, count
                if best < 0:
                    break
                anchors.append(tuple(w for w in adj[best] if w in placed_set))
                placed.append(best)
                placed_set.add(best)
            if len(placed) == n:
                return PlacementOrder(tuple(placed), tuple(anchors))
    raise NotAnchored(
        "some vertex never sees two placed unit neighbors; "
        "the set is too sparse (or too rigidly interlocked) to enumerate"
    )


@dataclass(frozen=True)
class UnitMapResult:
    """Enumerated maps (image tuple per original index) plus search stats."""

    maps: tuple
    nodes: int
    pruned: int
    truncated: bool

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)


def _origin_pair(backend: str, tol: float):
    if backend == "exact":
        return (Point(QScalar(0), QScalar(0)), Point(QScalar(1), QScalar(0)))
    return (Point.approx(0.0, 0.0, tol), Point.approx(1.0, 0.0, tol))


def _anchor_circle_pair(images):
    """First pair of distinct anchor images, in deterministic order."""
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if not points_equal(images[i], images[j]):
                return images[i], images[j]
    return None


def enumerate_unit_maps(T: PointSet, order: PlacementOrder = None,
                        branch_limit: int = DEFAULT_BRANCH_LIMIT,
                        normalize_mirror: bool = True,
                        prune_anchors: bool = True) -> UnitMapResult:
    """Every unit-preserving map of T into the plane, one per isometry class.

    With normalize_mirror=False the reflection is not quotiented out, and
    with prune_anchors=False only the two intersection anchors constrain a
    placement; the naive oracle uses both relaxations together with full
    leaf revalidation.
    """
    if order is None:
        order = placement_order(T)
    n = len(T)
    backend = T.backend
    tol = T[0].x.tol if backend == "float" and n else DEFAULT_TOL
    images = [None] * n
    maps = []
    stats = {"nodes": 0, "pruned": 0, "truncated": False}

    if n == 1:
        first = _origin_pair(backend, tol)[0]
        return UnitMapResult(((first,),), 1, 0, False)

    o0, o1 = order.order[0], order.order[1]
    base0, base1 = _origin_pair(backend, tol)
    images[o0] = base0
    images[o1] = base1

    def place(k: int, off_axis_fixed: bool):
        if stats["truncated"]:
            return
        if k == n:
            maps.append(tuple(images))
            return
        v = order.order[k]
        anchor_imgs = [images[a] for a in order.anchors[k]]
        pair = _anchor_circle_pair(anchor_imgs)
        if pair is None:
            raise NotAnchored(
                "all anchor images coincide while placing a vertex; "
                "candidate positions form a whole circle and cannot be enumerated"
            )
        candidates = circle_intersect(pair[0], 1, pair[1], 1)
        if not candidates:
            stats["pruned"] += 1
            return
        for cand in candidates:
            sign_y = scalar_sign(cand.y)
            if normalize_mirror and not off_axis_fixed and sign_y < 0:
                # mirror image of the positive-y branch, not a contradiction
                continue
            stats["nodes"] += 1
            if branch_limit is not None and stats["nodes"] > branch_limit:
                stats["truncated"] = True
                return
            if prune_anchors:
                ok = True
                for a in order.anchors[k]:
                    if not is_unit(cand, images[a]):
                        ok = False
                        break
                if not ok:
                    stats["pruned"] += 1
                    continue
            images[v] = cand
            place(k + 1, off_axis_fixed or sign_y != 0)
            images[v] = None
            if stats["truncated"]:
                return

    place(2, False)
    key = _map_sort_key
    maps.sort(key=key)
    return UnitMapResult(tuple(maps), stats["nodes"], stats["pruned"], stats["truncated"])


def _map_sort_key(images) -> tuple:
    out = []
    for p in images:
        fx, fy = p.to_float_pair()
        out.append(fx)
        out.append(fy)
    return tuple(out)


@dataclass(frozen=True)
class CertReport:
    """Outcome of a deviation certification run.

    certified is equivalent to max_deviation <= epsilon; a counterexample
    (the lexicographically least violating image vector) is present exactly
    when certification fails.
    """

    certified: bool
    epsilon: object
    max_deviation: object
    branch_count: int
    counterexample: tuple
    pruned_contradictions: int
    map_count: int
    backend: str


def _locate(T: PointSet, p) -> int:
    if isinstance(p, int):
        if not 0 <= p < len(T):
            raise ValueError(f"index {p} out of range")
        return p
    i = T.index_of(p)
    if i < 0:
        raise ValueError("point not in the set")
    return i


def _coerce_eps(eps, backend: str, tol: float):
    if backend == "exact":
        if isinstance(eps, (FloatVal, float)):
            from .errors import MixedBackend

            raise MixedBackend("exact certification needs an exact epsilon")
        return eps if isinstance(eps, QScalar) else QScalar(eps)
    if isinstance(eps, FloatVal):
        return eps
    return FloatVal(float(eps), tol)


def bq_certify(T: PointSet, x, y, epsilon, order: PlacementOrder = None,
               branch_limit: int = DEFAULT_BRANCH_LIMIT,
               float_fallback: bool = True) -> CertReport:
    """Certify that every unit-preserving map of T moves the x-y distance
    by at most epsilon.

    Exact instances whose circle intersections leave the field are retried
    on the float backend when float_fallback is set.  A truncated
    enumeration raises BudgetExhausted: certifying from a partial map list
    would be unsound.
    """
    xi = _locate(T, x)
    yi = _locate(T, y)
    try:
        return _certify_indices(T, xi, yi, epsilon, order, branch_limit)
    except NotRepresentable:
        if not float_fallback or T.backend == "float":
            raise
        tol = DEFAULT_TOL
        T2 = T.to_float(tol)
        eps2 = float(epsilon) if not isinstance(epsilon, FloatVal) else epsilon
        return _certify_indices(T2, xi, yi, eps2, None, branch_limit)


def _certify_indices(T, xi, yi, epsilon, order, branch_limit) -> CertReport:
    backend = T.backend
    tol = T[0].x.tol if backend == "float" else DEFAULT_TOL
    eps = _coerce_eps(epsilon, backend, tol)
    b2 = dist2(T[xi], T[yi])
    result = enumerate_unit_maps(T, order=order, branch_limit=branch_limit)
    if result.truncated:
        raise BudgetExhausted(
            f"enumeration exceeded branch limit {branch_limit}",
            partial=result,
        )
    worst_a2 = None
    counterexample = None
    counter_key = None
    for images in result.maps:
        a2 = dist2(images[xi], images[yi])
        if worst_a2 is None or compare_deviation(a2, worst_a2, b2) > 0:
            worst_a2 = a2
        if not sqrt_diff_within(a2, b2, eps):
            key = _map_sort_key(images)
            if counter_key is None or key < counter_key:
                counterexample = images
                counter_key = key
    max_dev = deviation_value(worst_a2, b2, tol) if worst_a2 is not None else None
    return CertReport(
        certified=counterexample is None,
        epsilon=eps,
        max_deviation=max_dev,
        branch_count=result.nodes,
        counterexample=counterexample,
        pruned_contradictions=result.pruned,
        map_count=len(result.maps),
        backend=backend,
    )


def naive_unit_maps(T: PointSet, order: PlacementOrder = None,
                    branch_limit: int = DEFAULT_BRANCH_LIMIT) -> set:
    """Independent oracle: enumerate without mirror normalization, validate
    every unit edge at each leaf, and canonicalize modulo reflection.

    Returns the set of canonical map keys; the normalized engine must
    produce exactly the same set (criterion: completeness of enumeration).
    """
    if order is None:
        order = placement_order(T)
    raw = enumerate_unit_maps(T, order=order, branch_limit=branch_limit,
                              normalize_mirror=False, prune_anchors=False)
    if raw.truncated:
        raise BudgetExhausted("naive enumeration exceeded its branch limit", partial=raw)
    edges = unit_graph(T).edges
    out = set()
    for images in raw.maps:
        if all(is_unit(images[i], images[j]) for i, j in edges):
            out.add(canonical_map_key(images))
    return out


def canonical_map_key(images) -> tuple:
    """Map key invariant under reflection about the x axis."""
    plain = _rounded_key(images)
    mirrored = _rounded_key([_mirror_point(p) for p in images])
    return min(plain, mirrored)


def _mirror_point(p: Point) -> Point:
    return Point(p.x, -p.y)


def _rounded_key(images) -> tuple:
    out = []
    for p in images:
        fx, fy = p.to_float_pair()
        out.append((round(fx, 7) + 0.0, round(fy, 7) + 0.0))
    return tuple(out)


# ---------------------------------------------------------------------------
# gadget library


@dataclass(frozen=True)
class Gadget:
    kind: str
    points: PointSet
    labels: tuple

    def labeled_index(self, name: str) -> int:
        try:
            return self.labels.index(name)
        except ValueError:
            raise ValueError(f"gadget {self.kind} has no point named {name!r}") from None


def gadget_triangle_extension(p: Point = P0, q: Point = P1) -> Gadget:
    """Unit edge plus its lexicographically smaller apex: 3 points, 3 edges."""
    if not is_unit(p, q):
        raise ValueError("triangle extension needs a unit attachment edge")
    apex = circle_intersect(p, 1, q, 1)[0]
    return Gadget("triangle-extension", PointSet([p, q, apex]), ("A", "B", "C"))


def gadget_rhombus(p: Point = P0, q: Point = P1) -> Gadget:
    """Two unit triangles glued along p-q: 4 points, 5 edges.

    Labels follow the long diagonal: A and D are the apexes at distance
    sqrt(3), B and C the shared edge.
    """
    if not is_unit(p, q):
        raise ValueError("rhombus needs a unit attachment edge")
    hits = circle_intersect(p, 1, q, 1)
    if len(hits) != 2:
        raise ValueError("degenerate rhombus attachment")
    a, d = hits
    return Gadget("rhombus", PointSet([a, p, q, d]), ("A", "B", "C", "D"))


def gadget_chain(n: int, start: Point = P0, toward: Point = None) -> Gadget:
    """n+1 collinear points at unit spacing from `start` toward `toward`."""
    if n < 1:
        raise ValueError("chain needs n >= 1")
    if toward is None:
        toward = Point(start.x + 1, start.y)
    d2 = dist2(start, toward)
    if scalar_sign(d2) == 0:
        raise ValueError("chain direction is undefined for coincident points")
    d = sqrt_exact(d2) if start.backend == "exact" else sqrt_value(d2)
    ux = (toward.x - start.x) / d
    uy = (toward.y - start.y) / d
    pts = [Point(start.x + j * ux, start.y + j * uy) for j in range(n + 1)]
    labels = tuple(chr(ord("A") + j) for j in range(n + 1))
    return Gadget("chain", PointSet(pts), labels)


_SPINDLE_LABELS = ("A", "B", "C", "D", "E", "F", "G")


def gadget_moser_spindle(attach: Point = None, tol: float = DEFAULT_TOL,
                         backend: str = "float") -> Gadget:
    """The 7-point, 11-edge spindle: two rhombi hinged at A with the far
    apexes D and G at unit distance.

    The hinge rotation has cosine 5/6, whose sine involves sqrt(11); the
    coordinates therefore do not exist on the exact backend and asking for
    it raises NotRepresentable.
    """
    if backend == "exact":
        raise NotRepresentable(
            "spindle hinge angle has cos 5/6 and sin sqrt(11)/6; "
            "its coordinates leave Q(sqrt(3))"
        )
    ax, ay = (0.0, 0.0) if attach is None else attach.to_float_pair()
    half = math.asin(1.0 / (2.0 * math.sqrt(3.0)))
    pts = [Point.approx(ax, ay, tol)]
    labels = ["A"]
    for sgn in (-1.0, 1.0):
        ang = sgn * half
        dx = math.sqrt(3.0) * math.cos(ang)
        dy = math.sqrt(3.0) * math.sin(ang)
        # side vertices: midpoint of A-D shifted along the perpendicular
        px, py = -dy / (2.0 * math.sqrt(3.0)), dx / (2.0 * math.sqrt(3.0))
        b = Point.approx(ax + dx / 2 + px, ay + dy / 2 + py, tol)
        c = Point.approx(ax + dx / 2 - px, ay + dy / 2 - py, tol)
        dpt = Point.approx(ax + dx, ay + dy, tol)
        pts.extend([b, c, dpt])
    labels.extend(["B", "C", "D", "E", "F", "G"])
    return Gadget("moser-spindle", PointSet(pts), tuple(labels))


def gadget(kind: str, **kwargs) -> Gadget:
    """Dispatch by CLI-facing gadget name."""
    if kind == "triangle-extension":
        return gadget_triangle_extension(**kwargs)
    if kind == "rhombus":
        return gadget_rhombus(**kwargs)
    if kind == "chain":
        return gadget_chain(**kwargs)
    if kind == "moser-spindle":
        return gadget_moser_spindle(**kwargs)
    raise ValueError(f"unknown gadget kind {kind!r}")


# ---------------------------------------------------------------------------
# witness growth


@dataclass(frozen=True)
class GrowResult:
    points: PointSet
    report: CertReport
    strategy: str


def _ladder(x: Point, y: Point, k: int) -> PointSet:
    """Chain of k unit hops from x to y with both apexes bracing each hop."""
    d = k
    ux = (y.x - x.x) / d
    uy = (y.y - x.y) / d
    chain = [Point(x.x + j * ux, x.y + j * uy) for j in range(k + 1)]
    pts = list(chain)
    for j in range(1, k + 1):
        pts.extend(circle_intersect(chain[j - 1], 1, chain[j], 1))
    return PointSet(pts)


def _integer_distance(x: Point, y: Point):
    """|x - y| when it is an integer >= 2, else None."""
    d2 = dist2(x, y)
    if x.backend == "exact":
        try:
            d = sqrt_exact(d2)
        except NotRepresentable:
            return None
        if d.is_rational and d.a.denominator == 1 and d.a >= 2:
            return int(d.a)
        return None
    d = math.sqrt(max(float(d2), 0.0))
    k = round(d)
    if k >= 2 and abs(d - k) <= d2.tol:
        return k
    return None


def grow_witness(x: Point, y: Point, epsilon, budget: int = DEFAULT_BRANCH_LIMIT) -> GrowResult:
    """A point set containing x and y whose enumeration certifies the
    epsilon bound, grown from a small strategy library.

    Strategies, in order: the bare unit edge (deviation 0), the rhombus on
    a sqrt(3) pair (deviation sqrt(3)), the braced ladder on integer
    distances (deviation 1 for distance 2, growing with length), and a
    braced unit path as a last resort.  If nothing certifies, raises
    BudgetExhausted carrying the best (set, report) pair seen; the best
    achieved deviation is genuinely the frontier of this library, not a
    search artifact.
    """
    if points_equal(x, y):
        raise ValueError("witness growth requires x != y")
    d2 = dist2(x, y)
    best = None

    def attempt(builder, name):
        nonlocal best
        try:
            T = builder()
            report = bq_certify(T, x, y, epsilon, branch_limit=budget)
        except (NotAnchored, NotRepresentable, ValueError):
            return None
        except BudgetExhausted:
            return None
        if best is None or compare_or_none(report, best[1]) < 0:
            best = (T, report, name)
        if report.certified:
            return GrowResult(T, report, name)
        return None

    def compare_or_none(new_report, old_report) -> int:
        # orders reports by achieved deviation, smaller first
        new_d = float(new_report.max_deviation)
        old_d = float(old_report.max_deviation)
        return (new_d > old_d) - (new_d < old_d)

    if d2 == 1:
        got = attempt(lambda: PointSet([x, y]), "edge")
        if got:
            return got
    if d2 == 3:
        def rhombus_builder():
            hits = circle_intersect(x, 1, y, 1)
            if len(hits) != 2:
                raise ValueError("degenerate rhombus")
            return PointSet([x, hits[0], hits[1], y])

        got = attempt(rhombus_builder, "rhombus")
        if got:
            return got
    k = _integer_distance(x, y)
    if k is not None:
        got = attempt(lambda: _ladder(x, y, k), "ladder")
        if got:
            return got
    # last resort: brace every hop of a generic unit path
    def braced_path_builder():
        path = unit_path(x, y)
        pts = list(path.vertices)
        vs = path.vertices
        for j in range(1, len(vs)):
            pts.extend(circle_intersect(vs[j - 1], 1, vs[j], 1))
        return PointSet(pts)

    got = attempt(braced_path_builder, "braced-path")
    if got:
        return got
    if best is None:
        raise BudgetExhausted(
            "no strategy produced an enumerable set for this pair",
            partial=None,
        )
    achieved = best[1].max_deviation
    raise BudgetExhausted(
        f"no strategy certified epsilon {epsilon}; best deviation {achieved}",
        partial=GrowResult(best[0], best[1], best[2]),
    )
