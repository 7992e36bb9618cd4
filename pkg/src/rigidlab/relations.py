"""Finite binary relational structures and a complete homomorphism engine.

The solver is a plain CSP backtracker: one variable per source element,
domains over target elements, constraints induced by the ordered pairs.
An initial arc-consistency pass plus forward checking keeps desk-scale
instances fast; results are canonically sorted so parallel or reordered
exploration cannot change observable output.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product as iter_product

from .errors import BudgetExhausted, NoWitnessExists


@dataclass(frozen=True)
class RelStruct:
    """Binary relational structure on universe {0, ..., n-1}."""

    n: int
    pairs: tuple  # sorted, deduplicated (i, j) tuples
    labels: tuple = None

    def __post_init__(self):
        pr = tuple(sorted({(int(i), int(j)) for i, j in self.pairs}))
        for i, j in pr:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"pair ({i},{j}) out of range for n={self.n}")
        object.__setattr__(self, "pairs", pr)
        if self.labels is not None:
            lb = tuple(str(x) for x in self.labels)
            if len(lb) != self.n:
                raise ValueError("labels length must equal n")
            object.__setattr__(self, "labels", lb)

    @property
    def pair_set(self) -> frozenset:
        return frozenset(self.pairs)

    def has(self, i: int, j: int) -> bool:
        return (i, j) in self.pair_set

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def restrict(self, indices) -> "RelStruct":
        """Induced substructure; element k is the k-th listed index."""
        idx = list(indices)
        pos = {v: k for k, v in enumerate(idx)}
        pr = [(pos[i], pos[j]) for (i, j) in self.pairs if i in pos and j in pos]
        lb = tuple(self.label(v) for v in idx) if self.labels else None
        return RelStruct(len(idx), tuple(pr), lb)


@dataclass(frozen=True)
class HomSearchResult:
    """Homomorphism list plus search metadata."""

    maps: tuple  # tuple of image vectors, each a tuple of ints
    truncated: bool
    nodes: int

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)


def _constraint_tables(src: RelStruct, dst: RelStruct):
    """Per-variable-pair constraint lookup.

    For variables u != v, need[(u, v)] lists the ordered src pairs between
    them; loops become unary domain filters.
    """
    dst_has = dst.pair_set
    loops = set()
    between = {}
    for i, j in src.pairs:
        if i == j:
            loops.add(i)
        else:
            between.setdefault((i, j), True)
    return dst_has, loops, between


def _images_ok(dst_has, between, u, v, a, b) -> bool:
    # checks both orientations of constraints between assigned u->a, v->b
    if (u, v) in between and (a, b) not in dst_has:
        return False
    if (v, u) in between and (b, a) not in dst_has:
        return False
    return True


def _revise(domains, dst_has, between, u, v) -> bool:
    """Remove values of u with no support at v; True when changed."""
    forward = (u, v) in between
    backward = (v, u) in between
    if not forward and not backward:
        return False
    keep = []
    for a in domains[u]:
        ok = False
        for b in domains[v]:
            if forward and (a, b) not in dst_has:
                continue
            if backward and (b, a) not in dst_has:
                continue
            ok = True
            break
        if ok:
            keep.append(a)
    if len(keep) != len(domains[u]):
        domains[u] = keep
        return True
    return False


def enumerate_homs(src: RelStruct, dst: RelStruct, pin=None, limit=None) -> HomSearchResult:
    """All maps src -> dst carrying src.pairs into dst.pairs, extending pin.

    Deterministic: the map list is sorted by image vector.  When `limit`
    cuts the search short the result is flagged truncated instead of
    raising; a truncated list is still sorted but not complete.
    """
    pin = dict(pin) if pin else {}
    for i, a in pin.items():
        if not (0 <= i < src.n and 0 <= a < dst.n):
            raise ValueError(f"pin {i}->{a} out of range")
    dst_has, loops, between = _constraint_tables(src, dst)

    unary = [a for a in range(dst.n)]
    domains = []
    for i in range(src.n):
        if i in pin:
            dom = [pin[i]]
        else:
            dom = list(unary)
        if i in loops:
            dom = [a for a in dom if (a, a) in dst_has]
        domains.append(dom)

    neighbors = [set() for _ in range(src.n)]
    for (i, j) in between:
        neighbors[i].add(j)
        neighbors[j].add(i)

    # AC-3 pass
    queue = [(u, v) for (u, v) in between] + [(v, u) for (u, v) in between]
    while queue:
        u, v = queue.pop()
        if _revise(domains, dst_has, between, u, v):
            if not domains[u]:
                return HomSearchResult((), False, 0)
            for w in neighbors[u]:
                if w != v:
                    queue.append((w, u))

    maps = []
    nodes = 0
    truncated = False
    assignment = [-1] * src.n

    def select_var(active_domains):
        best = -1
        best_size = None
        for i in range(src.n):
            if assignment[i] >= 0:
                continue
            size = len(active_domains[i])
            if best_size is None or size < best_size:
                best, best_size = i, size
        return best

    def search(active_domains):
        nonlocal nodes, truncated
        if truncated:
            return
        var = select_var(active_domains)
        if var < 0:
            maps.append(tuple(assignment))
            if limit is not None and len(maps) >= limit:
                truncated = True
            return
        for a in active_domains[var]:
            nodes += 1
            assignment[var] = a
            pruned = dict()
            dead = False
            for w in neighbors[var]:
                if assignment[w] >= 0:
                    if not _images_ok(dst_has, between, var, w, a, assignment[w]):
                        dead = True
                        break
                    continue
                keep = [b for b in active_domains[w]
                        if _images_ok(dst_has, between, var, w, a, b)]
                if not keep:
                    dead = True
                    break
                if len(keep) != len(active_domains[w]):
                    pruned[w] = active_domains[w]
                    active_domains[w] = keep
            if not dead:
                search(active_domains)
            for w, old in pruned.items():
                active_domains[w] = old
            assignment[var] = -1
            if truncated:
                return

    if all(domains):
        search(domains)
    maps.sort()
    return HomSearchResult(tuple(maps), truncated, nodes)


def brute_force_homs(src: RelStruct, dst: RelStruct, pin=None) -> tuple:
    """Independent oracle: check every one of dst.n ** src.n maps."""
    pin = dict(pin) if pin else {}
    out = []
    for vec in iter_product(range(dst.n), repeat=src.n):
        if any(vec[i] != a for i, a in pin.items()):
            continue
        if all((vec[i], vec[j]) in dst.pair_set for i, j in src.pairs):
            out.append(vec)
    return tuple(out)


@dataclass(frozen=True)
class RigidReport:
    rigid: bool
    endo_count: int

    def __bool__(self):
        return self.rigid


def is_rigid(s: RelStruct) -> RigidReport:
    """True when the only endomorphism is the identity."""
    result = enumerate_homs(s, s)
    identity = tuple(range(s.n))
    rigid = result.maps == (identity,)
    return RigidReport(rigid, len(result.maps))


@dataclass(frozen=True)
class WitnessSet:
    """Candidate witness: subset of the universe with a pinned source x
    and forbidden target y."""

    subset: tuple
    x: int
    y: int

    def __post_init__(self):
        sub = tuple(sorted(set(int(i) for i in self.subset)))
        object.__setattr__(self, "subset", sub)
        if self.x not in sub:
            raise ValueError("witness subset must contain x")


@dataclass(frozen=True)
class WitnessCheck:
    valid: bool
    counterexample: dict = None  # original-index map when invalid

    def __bool__(self):
        return self.valid


def check_witness(s: RelStruct, w: WitnessSet) -> WitnessCheck:
    """Valid iff no map of w.subset into the universe with x -> y preserves
    the pairs lying inside the subset."""
    sub = w.subset
    induced = s.restrict(sub)
    pos = {v: k for k, v in enumerate(sub)}
    result = enumerate_homs(induced, s, pin={pos[w.x]: w.y}, limit=1)
    if not result.maps:
        return WitnessCheck(True, None)
    vec = result.maps[0]
    return WitnessCheck(False, {sub[k]: vec[k] for k in range(len(sub))})


@dataclass(frozen=True)
class MinWitnessResult:
    witness: WitnessSet
    minimal: bool
    checks_used: int


def find_min_witness(s: RelStruct, x: int, y: int, budget: int = 4096) -> MinWitnessResult:
    """Smallest valid witness for (x, y) under an exhaustive-check budget.

    Subsets containing x are tried smallest-first; if the budget dies
    before the scan finishes, a greedy grow pass produces a valid but
    possibly non-minimal witness.  NoWitnessExists is raised when even the
    full universe fails, i.e. some endomorphism already sends x to y.
    """
    if x == y:
        raise ValueError("witness search requires x != y")
    checks = 0

    def checked(subset) -> WitnessCheck:
        nonlocal checks
        checks += 1
        return check_witness(s, WitnessSet(subset, x, y))

    full = tuple(range(s.n))
    if not checked(full).valid:
        raise NoWitnessExists(f"an endomorphism maps {x} to {y}")

    others = [i for i in range(s.n) if i != x]
    for size in range(1, s.n + 1):
        for rest in combinations(others, size - 1):
            if checks >= budget:
                break
            if checked((x,) + rest).valid:
                return MinWitnessResult(WitnessSet((x,) + rest, x, y), True, checks)
        else:
            continue
        break

    # budget exhausted mid-scan: grow greedily from {x}, always valid at full
    subset = [x]
    while checks < budget:
        if checked(tuple(subset)).valid:
            return MinWitnessResult(WitnessSet(tuple(subset), x, y), False, checks)
        for i in others:
            if i not in subset:
                subset.append(i)
                break
    raise BudgetExhausted(
        f"witness search for ({x},{y}) exceeded {budget} checks",
        partial=tuple(subset),
    )


@dataclass(frozen=True)
class Remark1Report:
    all_pairs_witnessed: bool
    rigid: bool
    unwitnessed_pairs: tuple


def remark1_check(s: RelStruct) -> Remark1Report:
    """Independently compute 'every ordered pair has a valid witness' and
    'the structure is rigid'.

    A witness for (x, y) exists iff the full universe is one, since any
    full endomorphism restricts to a counterexample on every subset.
    """
    bad = []
    full = tuple(range(s.n))
    for x in range(s.n):
        for y in range(s.n):
            if x == y:
                continue
            if not check_witness(s, WitnessSet(full, x, y)).valid:
                bad.append((x, y))
    return Remark1Report(not bad, is_rigid(s).rigid, tuple(bad))
