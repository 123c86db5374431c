"""Involutive quantales over a base frame, supports, and their laws.

The structures here are bare tables validated by exhaustive scans:
a quantale is a lattice plus multiplication and involution tables, a
based quantale adds a base frame acting on both sides, a support is a
join-preserving map into the base satisfying three axioms, and the law
checkers (stability, equivariance, unit laws, inverse laws,
multiplicativity, principality) are decision procedures over those
tables.  Scans are complete, never sampled; reports carry the first
witness per failed axiom.

Symbol conventions: ``top`` is the largest element (the paper-style
"1"), ``bottom`` the least ("0"), and ``unit`` the multiplication unit
("e") when one exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadInvolution,
    BadUnit,
    EquivalenceMismatch,
    FormMismatch,
    NoSupport,
    NotAssociative,
    NotBilinear,
    NotUnital,
    NotReflexive,
    QlabError,
    SizeLimitExceeded,
)
from .lattice import (
    FinSupLattice,
    Frame,
    FrameHom,
    JoinMap,
    as_frame,
    build_frame_hom,
    graded_join,
    join_over_downsets,
    join_preservation_witness,
    join_reduce,
    meet_preservation_witness,
    right_adjoint,
    sublattice,
)
from .limits import DEFAULT_LIMITS, Limits
from .report import Check, ReportSet, failed, passed, skipped
from . import tensor as tensor_mod


# --- plain involutive quantales --------------------------------------------

class Quantale:
    """An involutive quantale on a finite sup-lattice.

    ``mult`` is the n x n product table, ``inv`` the involution table,
    and ``unit`` the multiplication unit if one exists (units are
    detected automatically; they are unique).
    """

    __slots__ = ("lat", "mult", "inv", "unit")

    def __init__(self, lat: FinSupLattice, mult, inv, unit=None,
                 limits: Limits = DEFAULT_LIMITS):
        n = lat.n
        if n > limits.max_quantale_scan:
            raise SizeLimitExceeded(f"quantale of size {n} exceeds scan bound")
        mult = np.asarray(mult, dtype=np.int32)
        inv = np.asarray(inv, dtype=np.int32)
        if mult.shape != (n, n) or inv.shape != (n,):
            raise ValueError("table shape mismatch")
        _validate_quantale(lat, mult, inv)
        detected = _find_unit(lat, mult)
        if unit is not None and detected != int(unit):
            raise BadUnit(
                f"declared unit {unit} but table unit is {detected}",
                (unit,))
        self.lat = lat
        self.mult = mult
        self.inv = inv
        self.unit = detected
        self.mult.setflags(write=False)
        self.inv.setflags(write=False)

    @property
    def n(self) -> int:
        return self.lat.n

    def product(self, x: int, y: int) -> int:
        return int(self.mult[x, y])

    def star(self, x: int) -> int:
        return int(self.inv[x])

    def __repr__(self):
        u = "" if self.unit is None else f", unit={self.lat.labels[self.unit]}"
        return f"Quantale(n={self.n}{u})"


def _validate_quantale(lat: FinSupLattice, mult, inv):
    n = lat.n
    j2 = lat.join2
    bot = lat.bottom
    if not ((mult[bot, :] == bot).all() and (mult[:, bot] == bot).all()):
        x = int(np.flatnonzero((mult[bot, :] != bot)
                               | (mult[:, bot] != bot))[0])
        raise NotBilinear("bottom is not absorbing", (x,))
    for z in range(n):
        lhs = mult[j2, z]
        rhs = j2[mult[:, None, z], mult[None, :, z]]
        if not np.array_equal(lhs, rhs):
            x, y = map(int, np.argwhere(lhs != rhs)[0])
            raise NotBilinear(f"(x|y)z != xz|yz at ({x},{y},{z})", (x, y, z))
        lhs = mult[z, j2]
        rhs = j2[mult[z, :, None], mult[z, None, :]]
        if not np.array_equal(lhs, rhs):
            x, y = map(int, np.argwhere(lhs != rhs)[0])
            raise NotBilinear(f"z(x|y) != zx|zy at ({z},{x},{y})", (z, x, y))
    for z in range(n):
        lhs = mult[mult, z]
        rhs = mult[:, mult[:, z]]
        if not np.array_equal(lhs, rhs):
            x, y = map(int, np.argwhere(lhs != rhs)[0])
            raise NotAssociative(f"(xy)z != x(yz) at ({x},{y},{z})",
                                 (x, y, z))
    if not np.array_equal(inv[inv], np.arange(n)):
        x = int(np.flatnonzero(inv[inv] != np.arange(n))[0])
        raise BadInvolution("involution is not involutive", (x,))
    mono = lat.leq[inv][:, inv]
    if (lat.leq & ~mono).any():
        x, y = map(int, np.argwhere(lat.leq & ~mono)[0])
        raise BadInvolution("involution is not monotone", (x, y))
    anti = mult[inv[None, :], inv[:, None]]
    if not np.array_equal(inv[mult], anti):
        x, y = map(int, np.argwhere(inv[mult] != anti)[0])
        raise BadInvolution("(xy)* != y*x*", (x, y))


def _find_unit(lat: FinSupLattice, mult):
    ids = np.arange(lat.n)
    for e in range(lat.n):
        if np.array_equal(mult[e, :], ids) and np.array_equal(mult[:, e], ids):
            return e
    return None


def build_quantale(lat: FinSupLattice, mult, inv, unit=None,
                   limits: Limits = DEFAULT_LIMITS) -> Quantale:
    return Quantale(lat, mult, inv, unit=unit, limits=limits)


@dataclass(frozen=True)
class SidedElements:
    right: tuple     # a with a.top <= a
    left: tuple      # involutes of the right-sided elements
    two: tuple


def sided_elements(q: Quantale) -> SidedElements:
    lat = q.lat
    r_mask = lat.leq[q.mult[:, lat.top], np.arange(q.n)]
    right = tuple(int(x) for x in np.flatnonzero(r_mask))
    left = tuple(sorted(int(q.inv[x]) for x in right))
    two = tuple(x for x in right if x in set(left))
    for part in (right, left, two):
        ids = set(part)
        for x in part:
            for y in part:
                if lat.join(x, y) not in ids:
                    raise QlabError("sided set not closed under joins",
                                    (x, y))
        if lat.bottom not in ids:
            raise QlabError("sided set misses bottom")
    return SidedElements(right, left, two)


# --- based quantales --------------------------------------------------------

class BasedQuantale:
    """An involutive quantale that is a bimodule over a base frame.

    ``lact`` is |A| x |Q| (a, x) -> a.x and ``ract`` |Q| x |A|
    (x, a) -> x.a.  Construction checks the module laws, the action
    and involution compatibilities, and records whether the result is
    a quantal frame (underlying frame plus meet-compatible actions).
    """

    __slots__ = ("q", "base", "lact", "ract", "quantal_frame",
                 "quantal_frame_witness", "_sided")

    def __init__(self, q: Quantale, base: Frame, lact, ract,
                 limits: Limits = DEFAULT_LIMITS):
        n, nA = q.n, base.n
        lact = np.asarray(lact, dtype=np.int32)
        ract = np.asarray(ract, dtype=np.int32)
        if lact.shape != (nA, n) or ract.shape != (n, nA):
            raise ValueError("action table shape mismatch")
        tensor_mod.validate_actions(q.lat, q.lat, base, ract, lact)
        _validate_based(q, base, lact, ract)
        self.q = q
        self.base = base
        self.lact = lact
        self.ract = ract
        self.lact.setflags(write=False)
        self.ract.setflags(write=False)
        self.quantal_frame, self.quantal_frame_witness = \
            _quantal_frame_check(q, base, lact, ract)
        self._sided = None

    @property
    def n(self) -> int:
        return self.q.n

    def sided(self) -> SidedElements:
        if self._sided is None:
            self._sided = sided_elements(self.q)
        return self._sided

    def dstar_values(self) -> np.ndarray:
        """a -> a.top, the inverse image of the would-be domain map."""
        return self.lact[:, self.q.lat.top]

    def rstar_values(self) -> np.ndarray:
        """a -> top.a, the inverse image of the would-be range map."""
        return self.ract[self.q.lat.top, :]

    def __repr__(self):
        return f"BasedQuantale(n={self.n}, base={self.base.n})"


def _validate_based(q: Quantale, base: Frame, lact, ract):
    mult, inv = q.mult, q.inv
    nA = base.n
    for a in range(nA):
        # (a.x).b = a.(x.b)
        if not np.array_equal(ract[lact[a], :], lact[a, ract]):
            x, b = map(int, np.argwhere(ract[lact[a], :]
                                        != lact[a, ract])[0])
            raise QlabError(f"(a.x).b != a.(x.b) at (a={a},x={x},b={b})",
                            (a, x, b))
        # (a.x)y = a.(xy)
        if not np.array_equal(mult[lact[a], :], lact[a, mult]):
            x, y = map(int, np.argwhere(mult[lact[a], :]
                                        != lact[a, mult])[0])
            raise QlabError(f"(a.x)y != a.(xy) at (a={a},x={x},y={y})",
                            (a, x, y))
        # (x.a)y = x(a.y)
        if not np.array_equal(mult[ract[:, a], :], mult[:, lact[a]]):
            x, y = map(int, np.argwhere(mult[ract[:, a], :]
                                        != mult[:, lact[a]])[0])
            raise QlabError(f"(x.a)y != x(a.y) at (x={x},a={a},y={y})",
                            (x, a, y))
        # (xy).a = x(y.a)
        if not np.array_equal(ract[mult, a], mult[:, ract[:, a]]):
            x, y = map(int, np.argwhere(ract[mult, a]
                                        != mult[:, ract[:, a]])[0])
            raise QlabError(f"(xy).a != x(y.a) at (x={x},y={y},a={a})",
                            (x, y, a))
    for a in range(nA):
        for b in range(nA):
            # (a.x.b)* = b.x*.a
            lhs = inv[lact[a, ract[:, b]]]
            rhs = lact[b, ract[inv, a]]
            if not np.array_equal(lhs, rhs):
                x = int(np.flatnonzero(lhs != rhs)[0])
                raise BadInvolution(
                    f"(a.x.b)* != b.x*.a at (a={a},x={x},b={b})", (a, x, b))


def _quantal_frame_check(q: Quantale, base: Frame, lact, ract):
    lat = q.lat
    w = lat.distributivity_witness()
    if w is not None:
        return False, ("distributivity",) + w
    ids = np.arange(q.n)
    for a in range(base.n):
        # (a.x) & y = a.(x & y)
        lhs = lat.meet2[lact[a][:, None], ids[None, :]]
        rhs = lact[a, lat.meet2]
        if not np.array_equal(lhs, rhs):
            x, y = map(int, np.argwhere(lhs != rhs)[0])
            return False, ("left-restriction-meet", a, x, y)
        # (x.a) & y = (x & y).a
        lhs = lat.meet2[ract[:, a][:, None], ids[None, :]]
        rhs = ract[lat.meet2, a]
        if not np.array_equal(lhs, rhs):
            x, y = map(int, np.argwhere(lhs != rhs)[0])
            return False, ("right-restriction-meet", x, a, y)
    return True, None


def build_based_quantale(q: Quantale, base: Frame, lact, ract,
                         limits: Limits = DEFAULT_LIMITS) -> BasedQuantale:
    return BasedQuantale(q, base, lact, ract, limits=limits)


# --- supports ----------------------------------------------------------------

@dataclass
class Support:
    """A candidate support with its axiom flags and derived-law results.

    ``valid`` covers the three support axioms; ``stable`` and
    ``equivariant`` are filled by classify_support.  ``lemmas`` holds
    one Check per derived law so regressions carry witnesses.
    """

    based: BasedQuantale
    sigma: JoinMap
    valid: bool = False
    stable: bool | None = None
    equivariant: bool | None = None
    axioms: ReportSet = field(default_factory=ReportSet)
    lemmas: ReportSet = field(default_factory=ReportSet)
    matches_adjoint_candidate: bool | None = None


def adjoint_support_candidate(based: BasedQuantale) -> np.ndarray:
    """The only possible equivariant support: the left adjoint of
    a -> a.top, computed as s(x) = meet of every a with x <= a.top."""
    A = based.base.lat
    lat = based.q.lat
    dstar = based.dstar_values()
    out = np.empty(based.n, dtype=np.int32)
    for x in range(based.n):
        above = np.flatnonzero(lat.leq[x, dstar])
        out[x] = A.meet_of(above)
    return out


def check_support(based: BasedQuantale, sigma: JoinMap) -> Support:
    """Decide the support axioms and the derived laws for ``sigma``."""
    lat = based.q.lat
    A = based.base.lat
    mult, inv = based.q.mult, based.q.inv
    lact, ract = based.lact, based.ract
    s = sigma.values
    top = lat.top
    lab = lat.labels
    sup = Support(based=based, sigma=sigma)
    ax = sup.axioms

    if int(s[top]) == A.top:
        ax.add(passed("support-of-top", law="support-axiom-1"))
    else:
        ax.add(failed("support-of-top", (("top", lab[top]),),
                      law="support-axiom-1"))
    bad = None
    for x in range(based.n):
        rhs = mult[mult[x, inv[x]], :]
        good = lat.leq[lact[s[x]], rhs]
        if not good.all():
            bad = (x, int(np.flatnonzero(~good)[0]))
            break
    if bad is None:
        ax.add(passed("support-restriction-bound", law="support-axiom-2"))
    else:
        ax.add(failed("support-restriction-bound",
                      (("x", lab[bad[0]]), ("y", lab[bad[1]])),
                      law="support-axiom-2"))
    ids = np.arange(based.n)
    fix = lact[s, ids]
    if np.array_equal(fix, ids):
        ax.add(passed("support-fixes-element", law="support-axiom-3"))
    else:
        x = int(np.flatnonzero(fix != ids)[0])
        ax.add(failed("support-fixes-element", (("x", lab[x]),),
                      law="support-axiom-3"))
    sup.valid = ax.all_ok

    cand = adjoint_support_candidate(based)
    sup.matches_adjoint_candidate = bool(np.array_equal(cand, s))

    lem = sup.lemmas

    def law(name, ok, wit=()):
        lem.add(passed(name, law=name) if ok
                else failed(name, wit, law=name))

    # (s(x).y)* = y*.s(x)
    ok, wit = True, ()
    for x in range(based.n):
        lhs = inv[lact[s[x]]]
        rhs = ract[inv, s[x]]
        if not np.array_equal(lhs, rhs):
            y = int(np.flatnonzero(lhs != rhs)[0])
            ok, wit = False, (("x", lab[x]), ("y", lab[y]))
            break
    law("restriction-involution", ok, wit)

    # y.s(x) <= y x x*
    ok, wit = True, ()
    for x in range(based.n):
        rhs = mult[mult[:, x], inv[x]]
        good = lat.leq[ract[:, s[x]], rhs]
        if not good.all():
            y = int(np.flatnonzero(~good)[0])
            ok, wit = False, (("x", lab[x]), ("y", lab[y]))
            break
    law("right-restriction-bound", ok, wit)

    xxsx = mult[mult[ids, inv], ids]
    good = lat.leq[ids, xxsx]
    law("strongly-gelfand", bool(good.all()),
        () if good.all() else (("x", lab[int(np.flatnonzero(~good)[0])]),))

    good = lat.leq[ids, mult[:, top]]
    law("below-right-multiple", bool(good.all()),
        () if good.all() else (("x", lab[int(np.flatnonzero(~good)[0])]),))

    law("top-idempotent", int(mult[top, top]) == top,
        (("top", lab[top]),))

    r1 = mult[:, top]
    good = lact[s[r1], top] == r1
    law("support-of-right-multiple", bool(good.all()),
        () if good.all() else (("x", lab[int(np.flatnonzero(~good)[0])]),))

    right = based.sided().right
    good = all(int(lact[s[x], top]) == x for x in right)
    law("right-sided-retraction", good,
        () if good else tuple(("x", lab[x]) for x in right
                              if int(lact[s[x], top]) != x)[:1])

    # x = x.s(x*)
    good = ract[ids, s[inv]] == ids
    law("right-handed-restriction", bool(good.all()),
        () if good.all() else (("x", lab[int(np.flatnonzero(~good)[0])]),))

    # two-sided elements are self-adjoint
    two = based.sided().two
    good = all(int(inv[x]) == x for x in two)
    law("two-sided-self-adjoint", good,
        () if good else tuple(("x", lab[x]) for x in two
                              if int(inv[x]) != x)[:1])
    return sup


def classify_support(sup: Support) -> Support:
    """Fill the stable/equivariant flags, cross-checking all
    formulations of stability against one another."""
    based = sup.based
    lat = based.q.lat
    A = based.base.lat
    mult = based.q.mult
    s = sup.sigma.values
    lact, ract = based.lact, based.ract

    stable1 = all(bool(A.leq[s[mult[x]], s[x]].all())
                  for x in range(based.n))
    stable2 = bool(np.array_equal(s[mult[:, lat.top]], s))
    stable3 = all(np.array_equal(s[mult[x]], s[ract[x, s]])
                  for x in range(based.n))
    if not (stable1 == stable2 == stable3):
        raise EquivalenceMismatch(
            "stability formulations disagree: "
            f"contraction={stable1} top-saturation={stable2} "
            f"inner-support={stable3}")
    sup.stable = stable1

    equi = all(np.array_equal(s[lact[a]], A.meet2[a, s])
               for a in range(A.n))
    sup.equivariant = equi
    if equi and not sup.stable:
        raise EquivalenceMismatch("equivariant support found unstable")
    return sup


def derive_support(based: BasedQuantale) -> Support:
    """The unique equivariant support, or NoSupport with the obstacle."""
    cand = adjoint_support_candidate(based)
    w = join_preservation_witness(based.q.lat, based.base.lat, cand)
    if w is not None:
        raise NoSupport(f"adjoint candidate not join-preserving at {w}", w)
    sigma = JoinMap(based.q.lat, based.base.lat, cand)
    sup = check_support(based, sigma)
    if not sup.valid:
        bad = [c.name for c in sup.axioms.failures()]
        raise NoSupport("adjoint candidate fails " + ", ".join(bad))
    classify_support(sup)
    if not sup.equivariant:
        raise NoSupport("adjoint candidate support is not equivariant")
    return sup


# --- unital supports ----------------------------------------------------------

@dataclass
class UnitalReflection:
    """The induced unital support x -> s(x).e and its law results."""

    sigma_e: np.ndarray
    checks: ReportSet


def unital_reflection(sup: Support) -> UnitalReflection:
    based = sup.based
    q = based.q
    if q.unit is None:
        raise NotUnital("quantale has no multiplication unit")
    e = q.unit
    lat = q.lat
    lab = lat.labels
    ids = np.arange(q.n)
    s = sup.sigma.values
    sigma_e = based.lact[s, e]
    rs = ReportSet()

    good = lat.leq[sigma_e, e]
    rs.add(passed("unital-below-unit", law="unital-support-axiom-1")
           if good.all() else
           failed("unital-below-unit",
                  (("x", lab[int(np.flatnonzero(~good)[0])]),),
                  law="unital-support-axiom-1"))
    good = lat.leq[sigma_e, q.mult[ids, q.inv]]
    rs.add(passed("unital-below-xx*", law="unital-support-axiom-2")
           if good.all() else
           failed("unital-below-xx*",
                  (("x", lab[int(np.flatnonzero(~good)[0])]),),
                  law="unital-support-axiom-2"))
    good = lat.leq[ids, q.mult[sigma_e, ids]]
    rs.add(passed("unital-fixes-element", law="unital-support-axiom-3")
           if good.all() else
           failed("unital-fixes-element",
                  (("x", lab[int(np.flatnonzero(~good)[0])]),),
                  law="unital-support-axiom-3"))

    if sup.stable:
        f1 = lat.meet2[q.mult[:, lat.top], e]
        f2 = lat.meet2[q.mult[ids, q.inv], e]
        ok1 = np.array_equal(sigma_e, f1)
        ok2 = np.array_equal(sigma_e, f2)
        rs.add(passed("stable-support-formula-right-multiple",
                      law="stable-unital-formula")
               if ok1 else
               failed("stable-support-formula-right-multiple",
                      (("x", lab[int(np.flatnonzero(sigma_e != f1)[0])]),),
                      law="stable-unital-formula"))
        rs.add(passed("stable-support-formula-self-product",
                      law="stable-unital-formula")
               if ok2 else
               failed("stable-support-formula-self-product",
                      (("x", lab[int(np.flatnonzero(sigma_e != f2)[0])]),),
                      law="stable-unital-formula"))
        # (a & e) top >= join of y & z over yz* <= a, and of x over xx* <= a
        lhs = q.mult[lat.meet2[:, e], lat.top]
        w1 = join_over_downsets(
            lat, graded_join(lat, q.mult[:, q.inv], lat.meet2))
        w2 = join_over_downsets(
            lat, graded_join(lat, q.mult[ids, q.inv], ids))
        good = lat.leq[w1, lhs]
        rs.add(passed("stable-frame-bound-pairs", law="stable-frame-bound")
               if good.all() else
               failed("stable-frame-bound-pairs",
                      (("a", lab[int(np.flatnonzero(~good)[0])]),),
                      law="stable-frame-bound"))
        good = lat.leq[w2, lhs]
        rs.add(passed("stable-frame-bound-selfadjoint",
                      law="stable-frame-bound")
               if good.all() else
               failed("stable-frame-bound-selfadjoint",
                      (("a", lab[int(np.flatnonzero(~good)[0])]),),
                      law="stable-frame-bound"))
    return UnitalReflection(sigma_e=sigma_e, checks=rs)


# --- reflexive structures -------------------------------------------------------

@dataclass
class ReflexiveStructure:
    based: BasedQuantale
    upsilon: FrameHom
    lemmas: ReportSet = field(default_factory=ReportSet)


def check_reflexive(based: BasedQuantale, upsilon: FrameHom,
                    support: Support | None = None) -> ReflexiveStructure:
    """Verify u(a.top) = a = u(top.a); with a support, also the
    derived identities tying u to the support."""
    A = based.base.lat
    u = upsilon.values
    ids = np.arange(A.n)
    if not np.array_equal(u[based.dstar_values()], ids):
        a = int(np.flatnonzero(u[based.dstar_values()] != ids)[0])
        raise NotReflexive(f"u(a.top) != a at a={A.labels[a]}", (a,))
    if not np.array_equal(u[based.rstar_values()], ids):
        a = int(np.flatnonzero(u[based.rstar_values()] != ids)[0])
        raise NotReflexive(f"u(top.a) != a at a={A.labels[a]}", (a,))
    refl = ReflexiveStructure(based=based, upsilon=upsilon)
    if support is not None and support.stable:
        s = support.sigma.values
        r1 = based.q.mult[:, based.q.lat.top]
        ok = np.array_equal(u[r1], s)
        refl.lemmas.add(
            passed("upsilon-recovers-support", law="upsilon-support")
            if ok else
            failed("upsilon-recovers-support",
                   (("x", based.q.lat.labels[
                       int(np.flatnonzero(u[r1] != s)[0])]),),
                   law="upsilon-support"))
        if support.equivariant:
            ok = all(np.array_equal(u[based.lact[b, r1]],
                                    A.meet2[b, u[r1]])
                     for b in range(A.n))
            refl.lemmas.add(
                passed("upsilon-equivariant-on-right-multiples",
                       law="upsilon-equivariance")
                if ok else
                failed("upsilon-equivariant-on-right-multiples", (),
                       law="upsilon-equivariance"))
    return refl


# --- multiplicativity ------------------------------------------------------------

@dataclass
class ReducedMultiplication:
    tensor: tensor_mod.TensorLattice
    mu: JoinMap                    # carrier -> Q
    mu_star: np.ndarray            # Q -> carrier element ids
    multiplicative: bool
    witness: tuple = ()


def reduced_multiplication(based: BasedQuantale,
                           limits: Limits = DEFAULT_LIMITS
                           ) -> ReducedMultiplication:
    """Factor the multiplication through Q (x)_A Q and test whether
    its right adjoint preserves joins."""
    lat = based.q.lat
    t = tensor_mod.tensor_over_base(lat, lat, based.base,
                                    based.ract, based.lact, limits=limits)
    mu = tensor_mod.induced_map(t, based.q.mult, lat)
    mu_star = right_adjoint(mu)
    # m*(q) = join of pure(x, y) over xy <= q must agree with the adjoint
    for q in range(based.n):
        hit = lat.leq[based.q.mult, q]
        cols = join_reduce(
            lat, np.where(hit, np.arange(based.n)[:, None], lat.bottom),
            axis=0)
        direct = t.space.close(cols.astype(np.int32))
        if t.element_of(direct) != int(mu_star[q]):
            raise EquivalenceMismatch(
                "m* disagrees with the adjoint of the reduced "
                f"multiplication at {lat.labels[q]}")
    w = join_preservation_witness(lat, t.carrier, mu_star)
    return ReducedMultiplication(tensor=t, mu=mu, mu_star=mu_star,
                                 multiplicative=w is None,
                                 witness=w or ())


# --- unit and inverse laws ---------------------------------------------------------

def check_unit_laws(based: BasedQuantale, refl: ReflexiveStructure):
    """Join of u(x).y over xy <= a must give back a, for every a."""
    lat = based.q.lat
    u = refl.upsilon.values
    contrib = based.lact[u, :]                      # (x, y) -> u(x).y
    w = graded_join(lat, based.q.mult, contrib)
    result = join_over_downsets(lat, w)
    ids = np.arange(based.n)
    if np.array_equal(result, ids):
        return True, ()
    a = int(np.flatnonzero(result != ids)[0])
    return False, (("a", lat.labels[a]),
                   ("computed-join", lat.labels[int(result[a])]))


def check_inverse_laws(based: BasedQuantale, refl: ReflexiveStructure):
    """u(a).top must equal the join of x & y over x y* <= a.

    Both the pair form and the self-product form are evaluated and
    must agree; the verdict compares them with the restricted top.
    """
    lat = based.q.lat
    u = refl.upsilon.values
    ids = np.arange(based.n)
    pair_form = join_over_downsets(
        lat, graded_join(lat, based.q.mult[:, based.q.inv], lat.meet2))
    self_form = join_over_downsets(
        lat, graded_join(lat, based.q.mult[ids, based.q.inv], ids))
    if not np.array_equal(pair_form, self_form):
        a = int(np.flatnonzero(pair_form != self_form)[0])
        raise FormMismatch(
            f"inverse-law forms disagree at {lat.labels[a]}", (a,))
    lhs = based.lact[u, lat.top]
    if np.array_equal(lhs, pair_form):
        return True, ()
    a = int(np.flatnonzero(lhs != pair_form)[0])
    return False, (("a", lat.labels[a]),
                   ("restricted-top", lat.labels[int(lhs[a])]),
                   ("computed-join", lat.labels[int(pair_form[a])]))


def partial_units(q: Quantale):
    """The partial units {s | ss* v s*s <= e} and whether they cover top."""
    if q.unit is None:
        raise NotUnital("partial units need a multiplication unit")
    lat = q.lat
    ids = np.arange(q.n)
    both = lat.join2[q.mult[ids, q.inv], q.mult[q.inv, ids]]
    units = [int(x) for x in np.flatnonzero(lat.leq[both, q.unit])]
    covers = lat.join_of(units) == lat.top
    return units, covers


# --- groupoid quantale report -------------------------------------------------------

@dataclass
class GroupoidQuantaleReport:
    checks: ReportSet
    multiplicative: ReducedMultiplication | None

    @property
    def all_true(self) -> bool:
        return all(c.verdict == "pass" for c in self.checks.checks)


def is_groupoid_quantale(based: BasedQuantale, sup: Support,
                         refl: ReflexiveStructure,
                         limits: Limits = DEFAULT_LIMITS
                         ) -> GroupoidQuantaleReport:
    """The six-flag conjunction, with the unital cross-checks."""
    rs = ReportSet()
    if based.quantal_frame:
        rs.add(passed("quantal-frame", law="quantal-frame"))
    else:
        w = based.quantal_frame_witness
        rs.add(failed("quantal-frame", (("at", str(w)),),
                      law="quantal-frame"))
    if sup.stable is None:
        classify_support(sup)
    rs.add(passed("equivariant-support", law="equivariance")
           if (sup.valid and sup.equivariant) else
           failed("equivariant-support", (), law="equivariance"))
    rs.add(passed("reflexive", law="reflexivity"))  # construction-verified

    red = None
    try:
        red = reduced_multiplication(based, limits=limits)
        rs.add(passed("multiplicative", law="multiplicativity")
               if red.multiplicative else
               failed("multiplicative",
                      tuple(("join-at", str(x)) for x in red.witness),
                      law="multiplicativity"))
    except SizeLimitExceeded:
        rs.add(skipped("multiplicative", law="multiplicativity"))

    ok, wit = check_unit_laws(based, refl)
    rs.add(passed("unit-laws", law="unit-laws") if ok
           else failed("unit-laws", wit, law="unit-laws"))
    inv_ok, inv_wit = check_inverse_laws(based, refl)
    rs.add(passed("inverse-laws", law="inverse-laws") if inv_ok
           else failed("inverse-laws", inv_wit, law="inverse-laws"))

    if based.q.unit is not None:
        units, covers = partial_units(based.q)
        if covers != inv_ok:
            raise EquivalenceMismatch(
                "unital: inverse laws and partial-unit cover disagree "
                f"(cover={covers}, inverse-laws={inv_ok})")
        if inv_ok and not ok:
            raise EquivalenceMismatch(
                "unital: inverse laws hold but unit laws fail")
    return GroupoidQuantaleReport(checks=rs, multiplicative=red)


# --- principality --------------------------------------------------------------------

@dataclass
class PrincipalityReport:
    principal: bool
    sided_route: bool
    cokernel_route: bool
    equalizer_elements: tuple
    checks: ReportSet


def _sided_subframes(based: BasedQuantale):
    lat = based.q.lat
    sided = based.sided()
    r_lat, r_incl = sublattice(lat, sided.right)
    l_lat, l_incl = sublattice(lat, sided.left)
    t_lat, t_incl = sublattice(lat, sided.two)
    r_pos = {int(v): i for i, v in enumerate(r_incl.values)}
    l_pos = {int(v): i for i, v in enumerate(l_incl.values)}
    rf, lf, tf = as_frame(r_lat), as_frame(l_lat), as_frame(t_lat)
    into_r = build_frame_hom(tf, rf, [r_pos[int(v)] for v in t_incl.values])
    into_l = build_frame_hom(tf, lf, [l_pos[int(v)] for v in t_incl.values])
    return (rf, r_incl), (lf, l_incl), (tf, t_incl), into_r, into_l


def check_principal(based: BasedQuantale, sup: Support,
                    limits: Limits = DEFAULT_LIMITS) -> PrincipalityReport:
    """Principality via both equivalent routes, which must agree:
    the sided tensor R(Q) (x)_{T(Q)} L(Q) -> Q, and the cokernel pair
    of the subframe where the two restrictions of top coincide."""
    lat = based.q.lat
    A = based.base.lat
    rs = ReportSet()

    (rf, r_incl), (lf, l_incl), _, into_r, into_l = _sided_subframes(based)
    po = tensor_mod.frame_pushout(into_r, into_l, limits=limits)
    h = lat.meet2[np.asarray(r_incl.values)[:, None],
                  np.asarray(l_incl.values)[None, :]]
    cmp1 = tensor_mod.induced_map(po.tensor, h, lat)
    inj1 = len(set(map(int, cmp1.values))) == po.frame.n
    iso1 = inj1 and po.frame.n == based.n
    rs.add(passed("sided-comparison-injective", law="sided-injectivity")
           if inj1 else
           failed("sided-comparison-injective", (),
                  law="sided-injectivity"))
    rs.add(passed("sided-tensor-route", law="principality-sided")
           if iso1 else
           failed("sided-tensor-route",
                  (("tensor-size", str(po.frame.n)),
                   ("quantale-size", str(based.n))),
                  law="principality-sided"))

    # pure-tensor injectivity: r (x) l determined by r & l
    seen = {}
    pure_ok = True
    for ri in range(rf.n):
        for li in range(lf.n):
            key = int(h[ri, li])
            elem = po.tensor.pure_tensor(ri, li)
            if key in seen and seen[key] != elem:
                pure_ok = False
            seen.setdefault(key, elem)
    rs.add(passed("pure-tensor-injectivity", law="pure-tensor-injectivity")
           if pure_ok else
           failed("pure-tensor-injectivity", (),
                  law="pure-tensor-injectivity"))

    dstar = based.dstar_values()
    rstar = based.rstar_values()
    eq_ids = [int(a) for a in np.flatnonzero(dstar == rstar)]
    e_lat, e_incl = sublattice(A, eq_ids)
    ef = as_frame(e_lat)
    into_a = build_frame_hom(ef, based.base, e_incl.values)
    po2 = tensor_mod.frame_pushout(into_a, into_a, limits=limits)
    h2 = lat.meet2[dstar[:, None], rstar[None, :]]
    cmp2 = tensor_mod.induced_map(po2.tensor, h2, lat)
    iso2 = (len(set(map(int, cmp2.values))) == po2.frame.n
            and po2.frame.n == based.n)
    rs.add(passed("cokernel-pair-route", law="principality-cokernel")
           if iso2 else
           failed("cokernel-pair-route",
                  (("pushout-size", str(po2.frame.n)),
                   ("quantale-size", str(based.n))),
                  law="principality-cokernel"))

    if iso1 != iso2:
        raise EquivalenceMismatch(
            f"principality routes disagree: sided={iso1} cokernel={iso2}")
    return PrincipalityReport(
        principal=iso1, sided_route=iso1, cokernel_route=iso2,
        equalizer_elements=tuple(A.labels[a] for a in eq_ids), checks=rs)


# --- based-quantale homomorphisms ------------------------------------------------------

@dataclass
class HomReport:
    is_hom: bool
    strong: bool | None
    support_commuting: bool | None
    checks: ReportSet


def check_based_hom(src: BasedQuantale, tgt: BasedQuantale, f1, f0,
                    src_support: Support | None = None,
                    tgt_support: Support | None = None) -> HomReport:
    """Verify a pair of tables as a homomorphism of based quantales."""
    rs = ReportSet()
    f1 = np.asarray(f1, dtype=np.int32)
    f0 = np.asarray(f0, dtype=np.int32)
    ok = True

    w = join_preservation_witness(src.q.lat, tgt.q.lat, f1)
    rs.add(passed("f1-join-preserving") if w is None else
           failed("f1-join-preserving", (("at", str(w)),)))
    ok &= w is None
    lhs = f1[src.q.mult]
    rhs = tgt.q.mult[f1[:, None], f1[None, :]]
    good = np.array_equal(lhs, rhs)
    rs.add(passed("f1-multiplicative") if good else
           failed("f1-multiplicative",
                  tuple(("at", src.q.lat.labels[int(i)])
                        for i in np.argwhere(lhs != rhs)[0])))
    ok &= good
    good = np.array_equal(f1[src.q.inv], tgt.q.inv[f1])
    rs.add(passed("f1-involutive") if good else
           failed("f1-involutive", ()))
    ok &= good
    w = join_preservation_witness(src.base.lat, tgt.base.lat, f0)
    wm = meet_preservation_witness(src.base.lat, tgt.base.lat, f0)
    good = w is None and wm is None
    rs.add(passed("f0-frame-hom") if good else
           failed("f0-frame-hom", (("at", str(w or wm)),)))
    ok &= good
    good = all(np.array_equal(f1[src.lact[a]], tgt.lact[f0[a], f1])
               for a in range(src.base.n))
    rs.add(passed("left-action-compatible") if good else
           failed("left-action-compatible", ()))
    ok &= good
    good = all(np.array_equal(f1[src.ract[:, a]], tgt.ract[f1, f0[a]])
               for a in range(src.base.n))
    rs.add(passed("right-action-compatible") if good else
           failed("right-action-compatible", ()))
    ok &= good

    strong = None
    commuting = None
    if ok:
        strong = int(f1[src.q.lat.top]) == tgt.q.lat.top
        if src_support is not None and tgt_support is not None:
            commuting = bool(np.array_equal(
                f0[src_support.sigma.values], tgt_support.sigma.values[f1]))
    return HomReport(is_hom=ok, strong=strong,
                     support_commuting=commuting, checks=rs)
