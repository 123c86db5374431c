"""Built-in instance generators.

Every generator certifies its output before returning it (a generator
that hands back an unvalidated structure would poison every downstream
check), and results are cached per parameter list since the corpus
reuses instances heavily.  Tie-breaking and labeling are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadGroupTable, QlabError, SizeLimitExceeded
from ..groupoid import (
    LocalicGroupoid,
    SetGroupoid,
    compile_set_groupoid,
    quantale_from_groupoid,
)
from ..lattice import (
    FinSupLattice,
    Frame,
    JoinMap,
    as_frame,
    build_frame_hom,
    build_join_map,
    build_sup_lattice,
    powerset_lattice,
)
from ..limits import DEFAULT_LIMITS, Limits
from ..quantale import (
    BasedQuantale,
    ReflexiveStructure,
    Support,
    build_based_quantale,
    build_quantale,
    check_reflexive,
    check_support,
    classify_support,
)


@dataclass
class QuantaleInstance:
    """A based quantale bundled with its support and unit map."""

    name: str
    based: BasedQuantale
    support: Support | None
    reflexive: ReflexiveStructure | None

    @property
    def triple(self):
        return (self.based, self.support, self.reflexive)


_cache: dict = {}


def _cached(key, build):
    if key not in _cache:
        _cache[key] = build()
    return _cache[key]


# --- set-level groupoid builders -------------------------------------------

def pair_set_groupoid(n: int) -> SetGroupoid:
    """All ordered pairs over an n-point set."""
    objs = tuple(range(n))
    arrows = [(i, j) for i in range(n) for j in range(n)]
    aidx = {a: k for k, a in enumerate(arrows)}
    comp = {}
    for (i, j) in arrows:
        for (j2, k) in arrows:
            if j == j2:
                comp[aidx[i, j], aidx[j2, k]] = aidx[i, k]
    return SetGroupoid(
        objects=objs,
        arrows=tuple(f"{i}>{j}" for (i, j) in arrows),
        dom=tuple(i for (i, j) in arrows),
        cod=tuple(j for (i, j) in arrows),
        unit=tuple(aidx[i, i] for i in objs),
        inv=tuple(aidx[j, i] for (i, j) in arrows),
        comp=comp)


def group_set_groupoid(table, names=None) -> SetGroupoid:
    """One-object groupoid from a finite group multiplication table."""
    table = [list(row) for row in table]
    k = len(table)
    if any(len(row) != k for row in table):
        raise BadGroupTable("group table is not square")
    if any(sorted(row) != list(range(k)) for row in table) or \
            any(sorted(table[i][j] for i in range(k)) != list(range(k))
                for j in range(k)):
        raise BadGroupTable("group table rows/columns are not permutations")
    units = [e for e in range(k)
             if all(table[e][j] == j == table[j][e] for j in range(k))]
    if len(units) != 1:
        raise BadGroupTable("group table has no unique identity")
    e = units[0]
    for i in range(k):
        for j in range(k):
            for l in range(k):
                if table[table[i][j]][l] != table[i][table[j][l]]:
                    raise BadGroupTable("group table is not associative",
                                        (i, j, l))
    invs = []
    for i in range(k):
        cand = [j for j in range(k) if table[i][j] == e and table[j][i] == e]
        if len(cand) != 1:
            raise BadGroupTable(f"element {i} has no unique inverse", (i,))
        invs.append(cand[0])
    if names is None:
        names = [f"g{i}" for i in range(k)]
    comp = {(i, j): table[i][j] for i in range(k) for j in range(k)}
    return SetGroupoid(objects=("*",), arrows=tuple(names),
                       dom=(0,) * k, cod=(0,) * k, unit=(e,),
                       inv=tuple(invs), comp=comp)


def partition_set_groupoid(blocks) -> SetGroupoid:
    """Equivalence-relation groupoid of a partition of its point set."""
    blocks = [tuple(b) for b in blocks]
    points = sorted(p for b in blocks for p in b)
    if sorted(set(points)) != points:
        raise QlabError("blocks overlap or repeat a point")
    pidx = {p: i for i, p in enumerate(points)}
    arrows = []
    for b in blocks:
        for p in b:
            for q in b:
                arrows.append((p, q))
    arrows.sort()
    aidx = {a: k for k, a in enumerate(arrows)}
    comp = {}
    for (p, q) in arrows:
        for (q2, r) in arrows:
            if q == q2 and (p, r) in aidx:
                comp[aidx[p, q], aidx[q2, r]] = aidx[p, r]
    return SetGroupoid(
        objects=tuple(points),
        arrows=tuple(f"{p}>{q}" for (p, q) in arrows),
        dom=tuple(pidx[p] for (p, q) in arrows),
        cod=tuple(pidx[q] for (p, q) in arrows),
        unit=tuple(aidx[p, p] for p in points),
        inv=tuple(aidx[q, p] for (p, q) in arrows),
        comp=comp)


def trivial_set_groupoid() -> SetGroupoid:
    return partition_set_groupoid([(0,)])


# --- frames and lattices -----------------------------------------------------

def powerset(n: int, limits: Limits = DEFAULT_LIMITS) -> Frame:
    return _cached(("powerset", n, limits),
                   lambda: as_frame(powerset_lattice(list(range(n)),
                                                     limits=limits)))


def two() -> FinSupLattice:
    return _cached(("two",),
                   lambda: build_sup_lattice(2, [(0, 1)], labels=["0", "1"]))


def chain(k: int) -> FinSupLattice:
    return _cached(("chain", k), lambda: build_sup_lattice(
        k, [(i, i + 1) for i in range(k - 1)]))


# --- groupoid generators -------------------------------------------------------

def pairgroupoid(n: int, limits: Limits = DEFAULT_LIMITS) -> LocalicGroupoid:
    return _cached(("pairgroupoid", n, limits),
                   lambda: compile_set_groupoid(pair_set_groupoid(n),
                                                limits=limits))


def groupgroupoid(table, names=None,
                  limits: Limits = DEFAULT_LIMITS) -> LocalicGroupoid:
    key = ("groupgroupoid", tuple(map(tuple, table)), limits)
    return _cached(key, lambda: compile_set_groupoid(
        group_set_groupoid(table, names), limits=limits))


def zmod(k: int, limits: Limits = DEFAULT_LIMITS) -> LocalicGroupoid:
    table = [[(i + j) % k for j in range(k)] for i in range(k)]
    names = [f"{i}" for i in range(k)]
    return _cached(("zmod", k, limits), lambda: compile_set_groupoid(
        group_set_groupoid(table, names), limits=limits))


def partition(blocks, limits: Limits = DEFAULT_LIMITS) -> LocalicGroupoid:
    key = ("partition", tuple(tuple(b) for b in blocks), limits)
    return _cached(key, lambda: compile_set_groupoid(
        partition_set_groupoid(blocks), limits=limits))


def trivial_groupoid(limits: Limits = DEFAULT_LIMITS) -> LocalicGroupoid:
    return _cached(("trivial", limits),
                   lambda: compile_set_groupoid(trivial_set_groupoid(),
                                                limits=limits))


# --- quantale generators ----------------------------------------------------------

def rel(n: int, limits: Limits = DEFAULT_LIMITS) -> QuantaleInstance:
    """Binary relations on an n-point set, as the certified quantale of
    the pair groupoid: restrictions cut domains and codomains, the
    support takes domains, the unit map takes fixed points."""
    def build():
        g = pairgroupoid(n, limits=limits)
        oq = quantale_from_groupoid(g, limits=limits)
        return QuantaleInstance(f"rel({n})", oq.based, oq.support,
                                oq.reflexive)
    return _cached(("rel", n, limits), build)


def paperQ1(limits: Limits = DEFAULT_LIMITS) -> QuantaleInstance:
    """Three-element unital chain 0 < e < 1 with e the unit, based on
    {0, e}: satisfies unit laws, fails inverse laws."""
    def build():
        lat = build_sup_lattice(3, [(0, 1), (1, 2)], labels=["0", "e", "1"])
        q = build_quantale(lat, [[0, 0, 0], [0, 1, 2], [0, 2, 2]],
                           [0, 1, 2], limits=limits)
        alat = build_sup_lattice(2, [(0, 1)], labels=["0", "e"])
        a = as_frame(alat)
        lact = np.array([[0, 0, 0], [0, 1, 2]])
        based = build_based_quantale(q, a, lact, lact.T.copy(),
                                     limits=limits)
        sup = classify_support(
            check_support(based, build_join_map(lat, alat, [0, 1, 1])))
        refl = check_reflexive(
            based, build_frame_hom(as_frame(lat), a, [0, 1, 1]),
            support=sup)
        return QuantaleInstance("paperQ1", based, sup, refl)
    return _cached(("paperQ1", limits), build)


def paperQ2(limits: Limits = DEFAULT_LIMITS) -> QuantaleInstance:
    """Three-element non-unital chain 0 < a < 1 with a.a = 1, based on
    the two-element frame: satisfies inverse laws, fails unit laws."""
    def build():
        lat = build_sup_lattice(3, [(0, 1), (1, 2)], labels=["0", "a", "1"])
        q = build_quantale(lat, [[0, 0, 0], [0, 2, 2], [0, 2, 2]],
                           [0, 1, 2], limits=limits)
        alat = build_sup_lattice(2, [(0, 1)], labels=["0", "1"])
        a = as_frame(alat)
        lact = np.array([[0, 0, 0], [0, 1, 2]])
        based = build_based_quantale(q, a, lact, lact.T.copy(),
                                     limits=limits)
        sup = classify_support(
            check_support(based, build_join_map(lat, alat, [0, 1, 1])))
        refl = check_reflexive(
            based, build_frame_hom(as_frame(lat), a, [0, 0, 1]),
            support=sup)
        return QuantaleInstance("paperQ2", based, sup, refl)
    return _cached(("paperQ2", limits), build)


def retract(limits: Limits = DEFAULT_LIMITS) -> QuantaleInstance:
    """The two-element frame as a commutative quantale with trivial
    involution, based on the four-element frame through a retraction:
    its support s is stable but not equivariant.

    s embeds 2 into the powerset sending top to the whole set; r maps
    one atom back to top, the other to bottom; r . s = id.
    """
    def build():
        lat = build_sup_lattice(2, [(0, 1)], labels=["0", "1"])
        q = build_quantale(lat, lat.meet2, [0, 1], limits=limits)
        a = powerset(2, limits=limits)
        s_vals = [0, 3]                 # 0 -> {}, 1 -> {0,1}
        r_vals = [0, 1, 0, 1]           # {} , {0} -> 1, {1} -> 0, top -> 1
        lact = np.array([[lat.meet2[r_vals[u], x] for x in range(2)]
                         for u in range(4)])
        based = build_based_quantale(q, a, lact, lact.T.copy(),
                                     limits=limits)
        sup = classify_support(
            check_support(based, build_join_map(lat, a.lat, s_vals)))
        if not (sup.valid and sup.stable) or sup.equivariant:
            raise QlabError("retract instance must be stable and "
                            "not equivariant")
        return QuantaleInstance("retract", based, sup, None)
    return _cached(("retract", limits), build)


def group_quantale(k: int, limits: Limits = DEFAULT_LIMITS
                   ) -> QuantaleInstance:
    """Powerset of the cyclic group Z/k over the two-element base."""
    def build():
        g = zmod(k, limits=limits)
        oq = quantale_from_groupoid(g, limits=limits)
        return QuantaleInstance(f"group({k})", oq.based, oq.support,
                                oq.reflexive)
    return _cached(("group_quantale", k, limits), build)


def trivial_quantale(limits: Limits = DEFAULT_LIMITS) -> QuantaleInstance:
    """The two-element quantale over itself: the one-arrow groupoid."""
    def build():
        oq = quantale_from_groupoid(trivial_groupoid(limits), limits=limits)
        return QuantaleInstance("trivial", oq.based, oq.support,
                                oq.reflexive)
    return _cached(("trivial_quantale", limits), build)


def zero_endomorphism_base(limits: Limits = DEFAULT_LIMITS
                           ) -> QuantaleInstance:
    """The two-element frame based over itself with identity support;
    its zero endomorphism is a based hom that is not strong and does
    not commute with the supports."""
    def build():
        lat = build_sup_lattice(2, [(0, 1)], labels=["0", "1"])
        q = build_quantale(lat, lat.meet2, [0, 1], limits=limits)
        a = as_frame(lat)
        lact = np.array([[0, 0], [0, 1]])
        based = build_based_quantale(q, a, lact, lact.T.copy(),
                                     limits=limits)
        sup = classify_support(
            check_support(based, build_join_map(lat, lat, [0, 1])))
        refl = check_reflexive(
            based, build_frame_hom(a, a, [0, 1]), support=sup)
        return QuantaleInstance("two-over-two", based, sup, refl)
    return _cached(("zero_endo_base", limits), build)


# --- dispatch used by the DSL -----------------------------------------------------

GENERATOR_NAMES = ("powerset", "chain", "two", "rel", "pairgroupoid",
                   "groupgroupoid", "zmod", "partition", "trivial",
                   "retract", "paperQ1", "paperQ2", "group")


def generate(kind: str, args: tuple, limits: Limits = DEFAULT_LIMITS):
    """Dispatch a generator by name; DSL and CLI entry point."""
    if kind == "powerset":
        (n,) = args
        return powerset(int(n), limits)
    if kind == "chain":
        (k,) = args
        return chain(int(k))
    if kind == "two":
        return two()
    if kind == "rel":
        (n,) = args
        return rel(int(n), limits)
    if kind == "pairgroupoid":
        (n,) = args
        return pairgroupoid(int(n), limits)
    if kind == "zmod":
        (k,) = args
        return zmod(int(k), limits)
    if kind == "groupgroupoid":
        return groupgroupoid([list(map(int, row)) for row in args],
                             limits=limits)
    if kind == "partition":
        return partition(args, limits)
    if kind == "trivial":
        return trivial_groupoid(limits)
    if kind == "retract":
        return retract(limits)
    if kind == "paperQ1":
        return paperQ1(limits)
    if kind == "paperQ2":
        return paperQ2(limits)
    if kind == "group":
        (k,) = args
        return group_quantale(int(k), limits)
    raise QlabError(f"unknown generator {kind!r}")
