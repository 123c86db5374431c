"""Isomorphism search by backtracking over join-irreducibles.

Any lattice isomorphism restricts to a bijection of join-irreducible
elements and is recovered from it by joins, so the search assigns
join-irreducibles only, pruned by order-invariant colors, and verifies
the full structure tables on every completed candidate.  Equality of
structures everywhere in the workbench means: such an isomorphism
exists.  Tie-breaking is by element id, never randomized, so failures
reproduce exactly.
"""

from __future__ import annotations

import numpy as np

from ..errors import NoIsomorphism
from ..lattice import FinSupLattice
from ..quantale import BasedQuantale, Quantale


def _base_colors(lat: FinSupLattice, extra=None):
    """Per-element invariant tuple; isomorphisms must preserve it."""
    down = lat.leq.sum(axis=0)
    up = lat.leq.sum(axis=1)
    cols = []
    for x in range(lat.n):
        c = [int(down[x]), int(up[x])]
        if extra is not None:
            c.extend(extra(x))
        cols.append(tuple(c))
    # refine once by the color multiset of the strict downset
    refined = []
    for x in range(lat.n):
        below = sorted(cols[int(y)] for y in np.flatnonzero(lat.leq[:, x]))
        refined.append((cols[x], tuple(below)))
    return refined


def _extend_by_joins(src: FinSupLattice, tgt: FinSupLattice,
                     ji: list[int], images: list[int]) -> np.ndarray:
    values = np.empty(src.n, dtype=np.int32)
    for x in range(src.n):
        values[x] = tgt.join_of(images[k] for k, j in enumerate(ji)
                                if src.leq[j, x])
    return values


def _order_iso(src: FinSupLattice, tgt: FinSupLattice,
               values: np.ndarray) -> bool:
    if len(set(map(int, values))) != src.n or src.n != tgt.n:
        return False
    return bool(np.array_equal(src.leq, tgt.leq[values[:, None],
                                                values[None, :]]))


def _search(src: FinSupLattice, tgt: FinSupLattice, verify,
            extra_src=None, extra_tgt=None):
    """Backtracking JI assignment; ``verify`` accepts a full value
    table and returns True to accept.  Returns the table or None."""
    if src.n != tgt.n:
        return None
    csrc = _base_colors(src, extra_src)
    ctgt = _base_colors(tgt, extra_tgt)
    if sorted(csrc) != sorted(ctgt):
        return None
    ji_s = src.join_irreducibles()
    ji_t = tgt.join_irreducibles()
    if len(ji_s) != len(ji_t):
        return None
    # most-constrained-first: rare colors early
    from collections import Counter
    freq = Counter(ctgt[j] for j in ji_t)
    order = sorted(range(len(ji_s)), key=lambda k: (freq[csrc[ji_s[k]]],
                                                    ji_s[k]))
    ji = [ji_s[k] for k in order]
    cands = [[t for t in ji_t if ctgt[t] == csrc[j]] for j in ji]
    images: list[int] = []
    used: set[int] = set()

    def consistent(t: int) -> bool:
        j_new = ji[len(images)]
        for k, t_old in enumerate(images):
            j_old = ji[k]
            if bool(src.leq[j_old, j_new]) != bool(tgt.leq[t_old, t]):
                return False
            if bool(src.leq[j_new, j_old]) != bool(tgt.leq[t, t_old]):
                return False
        return True

    def step():
        if len(images) == len(ji):
            values = _extend_by_joins(src, tgt, ji, images)
            if _order_iso(src, tgt, values) and verify(values):
                return values
            return None
        for t in cands[len(images)]:
            if t in used or not consistent(t):
                continue
            images.append(t)
            used.add(t)
            got = step()
            if got is not None:
                return got
            images.pop()
            used.remove(t)
        return None

    return step()


def find_lattice_isomorphism(src: FinSupLattice,
                             tgt: FinSupLattice) -> np.ndarray:
    got = _search(src, tgt, lambda v: True)
    if got is None:
        raise NoIsomorphism(_mismatch_evidence(src, tgt))
    return got


def _mismatch_evidence(src, tgt) -> str:
    if src.n != tgt.n:
        return f"sizes differ: {src.n} vs {tgt.n}"
    a = sorted(_base_colors(src))
    b = sorted(_base_colors(tgt))
    if a != b:
        for x, y in zip(a, b):
            if x != y:
                return f"order invariants differ: {x[0]} vs {y[0]}"
    return "no assignment of join-irreducibles survives verification"


def _quantale_extra(q: Quantale):
    lat = q.lat
    down = lat.leq.sum(axis=0)

    def extra(x):
        return (
            int(down[q.mult[x, lat.top]]),
            int(down[q.mult[lat.top, x]]),
            int(q.inv[x] == x),
            int(down[q.mult[x, x]]),
            int(q.unit is not None and bool(lat.leq[x, q.unit])),
        )
    return extra


def _verify_quantale(q1: Quantale, q2: Quantale, values) -> bool:
    if not np.array_equal(values[q1.mult],
                          q2.mult[values[:, None], values[None, :]]):
        return False
    if not np.array_equal(values[q1.inv], q2.inv[values]):
        return False
    if (q1.unit is None) != (q2.unit is None):
        return False
    if q1.unit is not None and int(values[q1.unit]) != q2.unit:
        return False
    return True


def find_quantale_isomorphism(q1: Quantale, q2: Quantale) -> np.ndarray:
    if (q1.unit is None) != (q2.unit is None):
        raise NoIsomorphism("unit exists in one quantale only")
    got = _search(q1.lat, q2.lat, lambda v: _verify_quantale(q1, q2, v),
                  extra_src=_quantale_extra(q1), extra_tgt=_quantale_extra(q2))
    if got is None:
        raise NoIsomorphism(_mismatch_evidence(q1.lat, q2.lat))
    return got


def find_based_isomorphism(triple1, triple2):
    """Isomorphism of based quantales with support and unit map:
    a pair (f1, f0) preserving everything, f0 derived from f1."""
    b1, s1, r1 = triple1
    b2, s2, r2 = triple2

    def verify(values):
        if not _verify_quantale(b1.q, b2.q, values):
            return False
        # f0 is forced: a = u(a . top) so f0(a) = u2(f1(a . top))
        f0 = r2.upsilon.values[values[b1.dstar_values()]]
        if len(set(map(int, f0))) != b1.base.n:
            return False
        if not np.array_equal(b1.base.lat.leq,
                              b2.base.lat.leq[f0[:, None], f0[None, :]]):
            return False
        for a in range(b1.base.n):
            if not np.array_equal(values[b1.lact[a]],
                                  b2.lact[f0[a], values]):
                return False
            if not np.array_equal(values[b1.ract[:, a]],
                                  b2.ract[values, f0[a]]):
                return False
        if not np.array_equal(f0[s1.sigma.values], s2.sigma.values[values]):
            return False
        if not np.array_equal(f0[r1.upsilon.values],
                              r2.upsilon.values[values]):
            return False
        verify.f0 = f0
        return True

    got = _search(b1.q.lat, b2.q.lat, verify,
                  extra_src=_quantale_extra(b1.q),
                  extra_tgt=_quantale_extra(b2.q))
    if got is None:
        raise NoIsomorphism(_mismatch_evidence(b1.q.lat, b2.q.lat))
    return got, verify.f0


def find_groupoid_isomorphism(g1, g2):
    """Pair of frame isomorphisms commuting with all five structure
    homomorphisms (and hence with composition)."""

    def extra_of(g):
        lat = g.arrows.lat
        down = lat.leq.sum(axis=0)
        du = g.dstar.values[g.ustar.values]
        ru = g.rstar.values[g.ustar.values]

        def extra(x):
            return (
                int(down[du[x]]),
                int(down[ru[x]]),
                int(g.istar.values[x] == x),
                int(down[g.products[x, x]]),
            )
        return extra

    def verify(values):
        phi0 = g2.ustar.values[values[g1.dstar.values]]
        if len(set(map(int, phi0))) != g1.objects.n:
            return False
        if not np.array_equal(g1.objects.lat.leq,
                              g2.objects.lat.leq[phi0[:, None],
                                                 phi0[None, :]]):
            return False
        if not np.array_equal(values[g1.dstar.values],
                              g2.dstar.values[phi0]):
            return False
        if not np.array_equal(values[g1.rstar.values],
                              g2.rstar.values[phi0]):
            return False
        if not np.array_equal(phi0[g1.ustar.values],
                              g2.ustar.values[values]):
            return False
        if not np.array_equal(values[g1.istar.values],
                              g2.istar.values[values]):
            return False
        if not np.array_equal(values[g1.products],
                              g2.products[values[:, None], values[None, :]]):
            return False
        verify.phi0 = phi0
        return True

    if g1.objects.n != g2.objects.n or g1.arrows.n != g2.arrows.n:
        raise NoIsomorphism(
            f"frame sizes differ: ({g1.objects.n},{g1.arrows.n}) vs "
            f"({g2.objects.n},{g2.arrows.n})")
    got = _search(g1.arrows.lat, g2.arrows.lat, verify,
                  extra_src=extra_of(g1), extra_tgt=extra_of(g2))
    if got is None:
        raise NoIsomorphism(_mismatch_evidence(g1.arrows.lat, g2.arrows.lat))
    return got, verify.phi0
