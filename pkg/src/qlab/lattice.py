"""Finite sup-lattices, frames, join-preserving maps, and Galois adjoints.

This is the substrate for every other module.  A lattice is a dense
boolean order matrix with precomputed binary join/meet tables; elements
are opaque integer ids with an optional label table used only for
reporting.  All "arbitrary join" conditions reduce to bottom plus binary
joins because everything is finite; that reduction is used throughout
and is verified nowhere else.

All values are immutable after construction and every operation is a
pure function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NotAFrame,
    NotALattice,
    NotAPartialOrder,
    NotFrameHom,
    NotJoinPreserving,
    NotMeetPreserving,
    SizeLimitExceeded,
)
from .limits import DEFAULT_LIMITS, Limits


def _as_bool_matrix(leq) -> np.ndarray:
    m = np.array(leq, dtype=bool)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("order matrix must be square")
    return m


class FinSupLattice:
    """A finite complete lattice on elements 0..n-1.

    ``leq[i, j]`` holds iff i <= j.  ``join2``/``meet2`` are n x n id
    tables.  Construction validates the partial-order axioms, existence
    of all binary joins and meets, and agreement of the tables with the
    order; precomputed tables may be supplied and are then verified.
    """

    __slots__ = ("n", "leq", "join2", "meet2", "bottom", "top", "labels",
                 "bitwise", "_ji_cache")

    def __init__(self, leq, labels=None, join2=None, meet2=None,
                 limits: Limits = DEFAULT_LIMITS):
        m = _as_bool_matrix(leq)
        n = m.shape[0]
        if n == 0:
            raise NotALattice("a complete lattice cannot be empty")
        if n > limits.max_lattice:
            raise SizeLimitExceeded(f"lattice size {n} exceeds bound")
        _check_partial_order(m)
        if join2 is None or meet2 is None:
            join2, meet2 = _pair_tables(m)
        else:
            join2 = np.asarray(join2, dtype=np.int32)
            meet2 = np.asarray(meet2, dtype=np.int32)
            _verify_pair_tables(m, join2, meet2)
        self.n = n
        self.leq = m
        self.join2 = join2
        self.meet2 = meet2
        bottoms = np.flatnonzero(m.all(axis=1))
        tops = np.flatnonzero(m.all(axis=0))
        # existence follows from binary meets/joins plus finiteness
        self.bottom = int(bottoms[0])
        self.top = int(tops[0])
        if labels is None:
            labels = [str(i) for i in range(n)]
        self.labels = tuple(str(x) for x in labels)
        if len(self.labels) != n:
            raise ValueError("label table size mismatch")
        self._ji_cache = None
        # powerset-style id arithmetic unlocks bitwise fast paths
        ii = np.arange(n)
        self.bitwise = bool(
            np.array_equal(join2, ii[:, None] | ii[None, :])
            and np.array_equal(meet2, ii[:, None] & ii[None, :]))
        for arr in (self.leq, self.join2, self.meet2):
            arr.setflags(write=False)

    # -- basic queries ---------------------------------------------------

    def le(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j])

    def join(self, i: int, j: int) -> int:
        return int(self.join2[i, j])

    def meet(self, i: int, j: int) -> int:
        return int(self.meet2[i, j])

    def join_of(self, elems) -> int:
        """Least upper bound of a subset; the empty join is bottom."""
        if self.bitwise:
            acc = self.bottom
            for x in elems:
                acc |= int(x)
            return acc
        acc = self.bottom
        for x in elems:
            acc = int(self.join2[acc, x])
        return acc

    def meet_of(self, elems) -> int:
        """Greatest lower bound of a subset; the empty meet is top."""
        if self.bitwise:
            acc = self.top
            for x in elems:
                acc &= int(x)
            return acc
        acc = self.top
        for x in elems:
            acc = int(self.meet2[acc, x])
        return acc

    def downset(self, i: int) -> np.ndarray:
        return self.leq[:, i]

    def upset(self, i: int) -> np.ndarray:
        return self.leq[i, :]

    def label(self, i: int) -> str:
        return self.labels[i]

    def join_irreducibles(self) -> list[int]:
        """Elements with exactly one lower cover (excludes bottom).

        Every element is the join of the join-irreducibles below it;
        this is the generating set used by the map enumerators.
        """
        if self._ji_cache is None:
            out = []
            for x in range(self.n):
                below = [y for y in range(self.n)
                         if self.leq[y, x] and y != x]
                if not below:
                    continue  # bottom
                if self.join_of(below) != x:
                    out.append(x)
            self._ji_cache = out
        return self._ji_cache

    def distributivity_witness(self):
        """First (x, y, z) with x & (y | z) != (x & y) | (x & z), or None."""
        j2, m2 = self.join2, self.meet2
        for x in range(self.n):
            lhs = m2[x, j2]                       # lhs[y, z] = x & (y | z)
            rhs = j2[m2[x, :][:, None], m2[x, :][None, :]]
            if not np.array_equal(lhs, rhs):
                y, z = np.argwhere(lhs != rhs)[0]
                return (x, int(y), int(z))
        return None

    def __repr__(self):
        return f"FinSupLattice(n={self.n})"


def _check_partial_order(m: np.ndarray):
    n = m.shape[0]
    if not m.diagonal().all():
        i = int(np.flatnonzero(~m.diagonal())[0])
        raise NotAPartialOrder("order is not reflexive", (i,))
    sym = m & m.T
    np.fill_diagonal(sym, False)
    if sym.any():
        i, j = map(int, np.argwhere(sym)[0])
        raise NotAPartialOrder(f"antisymmetry fails at ({i}, {j})", (i, j))
    comp = (m.astype(np.float32) @ m.astype(np.float32)) > 0
    if (comp & ~m).any():
        i, j = map(int, np.argwhere(comp & ~m)[0])
        raise NotAPartialOrder(f"transitivity fails at ({i}, {j})", (i, j))


def _unique_least(m: np.ndarray, bounds: np.ndarray):
    """Id of the least element of the bound set, or None."""
    idx = np.flatnonzero(bounds)
    if idx.size == 0:
        return None
    # a least bound is below every other bound
    sub = m[np.ix_(idx, idx)]
    least = np.flatnonzero(sub.all(axis=1))
    if least.size != 1:
        return None
    return int(idx[least[0]])


def _pair_tables(m: np.ndarray):
    n = m.shape[0]
    join2 = np.empty((n, n), dtype=np.int32)
    meet2 = np.empty((n, n), dtype=np.int32)
    for i in range(n):
        for j in range(i, n):
            ub = m[i, :] & m[j, :]
            lub = _unique_least(m, ub)
            if lub is None:
                raise NotALattice(f"pair ({i}, {j}) has no join", (i, j))
            lb = m[:, i] & m[:, j]
            glb = _unique_least(m.T, lb)
            if glb is None:
                raise NotALattice(f"pair ({i}, {j}) has no meet", (i, j))
            join2[i, j] = join2[j, i] = lub
            meet2[i, j] = meet2[j, i] = glb
    return join2, meet2


def _verify_pair_tables(m: np.ndarray, join2: np.ndarray, meet2: np.ndarray):
    n = m.shape[0]
    ii = np.arange(n)
    # x <= y iff x | y = y, and dually
    if not np.array_equal(m, join2 == ii[None, :]):
        bad = np.argwhere(m != (join2 == ii[None, :]))[0]
        raise NotALattice("join table disagrees with order", tuple(map(int, bad)))
    if not np.array_equal(m, meet2 == ii[:, None]):
        raise NotALattice("meet table disagrees with order")
    # join2[i,j] is an upper bound and below every other upper bound
    if not (m[ii[:, None], join2].all() and m[ii[None, :], join2].all()):
        raise NotALattice("join table entry is not an upper bound")
    if not (m[meet2, ii[:, None]].all() and m[meet2, ii[None, :]].all()):
        raise NotALattice("meet table entry is not a lower bound")
    for k in range(n):
        ub = m[:, k][:, None] & m[:, k][None, :]
        if not m[join2, k][ub].all():
            raise NotALattice("join table entry is not least")
        lb = m[k, :][:, None] & m[k, :][None, :]
        if not m[k, meet2][lb].all():
            raise NotALattice("meet table entry is not greatest")


def join_reduce(lat: FinSupLattice, arr, axis: int) -> np.ndarray:
    """Join-reduce an array of element ids along an axis, in log passes."""
    arr = np.asarray(arr, dtype=np.int32)
    if lat.bitwise:
        return np.bitwise_or.reduce(arr, axis=axis)
    arr = np.moveaxis(arr, axis, -1)
    while arr.shape[-1] > 1:
        k = arr.shape[-1]
        if k % 2:
            arr = np.concatenate(
                [arr, np.full(arr.shape[:-1] + (1,), lat.bottom,
                              dtype=np.int32)], axis=-1)
        arr = lat.join2[arr[..., 0::2], arr[..., 1::2]]
    return arr[..., 0]


def graded_join(lat: FinSupLattice, keys, values) -> np.ndarray:
    """Table W with W[k] = join of all values whose key equals k.

    Keys index ``lat`` elements; keys that never occur map to bottom.
    This is the workhorse behind every big-join formula: a join over
    all pairs with a bounded product reduces to one pass here plus one
    pass over ``join_over_downsets``.
    """
    keys = np.asarray(keys).ravel()
    values = np.asarray(values, dtype=np.int32).ravel()
    order = np.argsort(keys, kind="stable")
    skeys = keys[order]
    svals = values[order]
    bounds = np.searchsorted(skeys, np.arange(lat.n + 1))
    out = np.full(lat.n, lat.bottom, dtype=np.int32)
    nonempty = bounds[:-1] < bounds[1:]
    if lat.bitwise:
        if nonempty.any():
            out[nonempty] = np.bitwise_or.reduceat(
                svals, bounds[:-1][nonempty])
        return out
    for k in np.flatnonzero(nonempty):
        out[k] = join_reduce(lat, svals[bounds[k]:bounds[k + 1]], axis=0)
    return out


def join_over_downsets(lat: FinSupLattice, table) -> np.ndarray:
    """Result r with r[a] = join of table[p] over all p <= a."""
    table = np.asarray(table, dtype=np.int32)
    out = np.empty(lat.n, dtype=np.int32)
    for a in range(lat.n):
        out[a] = join_reduce(
            lat, np.where(lat.leq[:, a], table, lat.bottom), axis=0)
    return out


def build_sup_lattice(n: int, order_pairs, labels=None,
                      limits: Limits = DEFAULT_LIMITS) -> FinSupLattice:
    """Lattice from generating order pairs (reflexive-transitive closure)."""
    if n <= 0:
        raise NotALattice("need at least one element")
    m = np.eye(n, dtype=bool)
    for i, j in order_pairs:
        m[i, j] = True
    # Warshall closure
    for k in range(n):
        m |= m[:, k][:, None] & m[k, :][None, :]
    return FinSupLattice(m, labels=labels, limits=limits)


def powerset_lattice(atoms, limits: Limits = DEFAULT_LIMITS) -> FinSupLattice:
    """The powerset of the given atom names, elements indexed by bitmask."""
    atoms = list(atoms)
    k = len(atoms)
    n = 1 << k
    if n > limits.max_lattice:
        raise SizeLimitExceeded(f"powerset on {k} atoms exceeds bound")
    ii = np.arange(n, dtype=np.int64)
    leq = (ii[:, None] & ~ii[None, :]) == 0
    join2 = (ii[:, None] | ii[None, :]).astype(np.int32)
    meet2 = (ii[:, None] & ii[None, :]).astype(np.int32)
    labels = [subset_label(mask, atoms) for mask in range(n)]
    return FinSupLattice(leq, labels=labels, join2=join2, meet2=meet2,
                         limits=limits)


def subset_label(mask: int, atoms) -> str:
    if mask == 0:
        return "{}"
    names = [str(atoms[b]) for b in range(len(atoms)) if mask >> b & 1]
    return "{" + ",".join(names) + "}"


# --- join-preserving maps -------------------------------------------------

class JoinMap:
    """A validated sup-lattice homomorphism given by a value table."""

    __slots__ = ("source", "target", "values")

    def __init__(self, source: FinSupLattice, target: FinSupLattice, values,
                 _checked=False):
        vals = np.asarray(values, dtype=np.int32)
        if vals.shape != (source.n,):
            raise ValueError("value table size mismatch")
        if not _checked:
            w = join_preservation_witness(source, target, vals)
            if w is not None:
                raise NotJoinPreserving(
                    f"join not preserved at {w}", w)
        self.source = source
        self.target = target
        self.values = vals
        self.values.setflags(write=False)

    def __call__(self, x: int) -> int:
        return int(self.values[x])

    def compose(self, inner: "JoinMap") -> "JoinMap":
        """self after inner."""
        if inner.target is not self.source:
            raise ValueError("composition type mismatch")
        return JoinMap(inner.source, self.target, self.values[inner.values],
                       _checked=True)

    def table_equal(self, other: "JoinMap") -> bool:
        return np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"JoinMap({self.source.n}->{self.target.n})"


def join_preservation_witness(src: FinSupLattice, tgt: FinSupLattice, vals):
    """None if the table preserves bottom and binary joins, else a witness.

    The witness is () for the empty join and (x, y) for a binary one.
    """
    vals = np.asarray(vals)
    if vals[src.bottom] != tgt.bottom:
        return ()
    lhs = vals[src.join2]
    rhs = tgt.join2[vals[:, None], vals[None, :]]
    if not np.array_equal(lhs, rhs):
        x, y = np.argwhere(lhs != rhs)[0]
        return (int(x), int(y))
    return None


def meet_preservation_witness(src: FinSupLattice, tgt: FinSupLattice, vals):
    vals = np.asarray(vals)
    if vals[src.top] != tgt.top:
        return ()
    lhs = vals[src.meet2]
    rhs = tgt.meet2[vals[:, None], vals[None, :]]
    if not np.array_equal(lhs, rhs):
        x, y = np.argwhere(lhs != rhs)[0]
        return (int(x), int(y))
    return None


def build_join_map(src: FinSupLattice, tgt: FinSupLattice, values) -> JoinMap:
    return JoinMap(src, tgt, values)


def is_monotone(src: FinSupLattice, tgt: FinSupLattice, vals) -> bool:
    vals = np.asarray(vals)
    return bool(tgt.leq[vals[:, None], vals[None, :]][src.leq].all())


def right_adjoint(f: JoinMap) -> np.ndarray:
    """Table of g with f(x) <= y iff x <= g(y); g preserves all meets.

    Computed as g(y) = join of every x with f(x) <= y.
    """
    src, tgt = f.source, f.target
    out = np.empty(tgt.n, dtype=np.int32)
    for y in range(tgt.n):
        below = np.flatnonzero(tgt.leq[f.values, y])
        out[y] = src.join_of(below)
    out.setflags(write=False)
    return out


def left_adjoint(src: FinSupLattice, tgt: FinSupLattice, g_values) -> JoinMap:
    """Left adjoint of a meet-preserving map g: src -> tgt.

    Returns f: tgt -> src with f(x) <= y iff x <= g(y), computed as
    f(x) = meet of every y with x <= g(y).  Rejects non-meet-preserving
    tables with a witness.
    """
    g = np.asarray(g_values, dtype=np.int32)
    w = meet_preservation_witness(src, tgt, g)
    if w is not None:
        raise NotMeetPreserving(f"meet not preserved at {w}", w)
    vals = np.empty(tgt.n, dtype=np.int32)
    for x in range(tgt.n):
        above = np.flatnonzero(tgt.leq[x, g])
        vals[x] = src.meet_of(above)
    return JoinMap(tgt, src, vals)


def identity_map(lat: FinSupLattice) -> JoinMap:
    return JoinMap(lat, lat, np.arange(lat.n, dtype=np.int32), _checked=True)


# --- frames ----------------------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """A lattice with verified binary-over-finite-join distributivity."""

    lat: FinSupLattice

    @property
    def n(self) -> int:
        return self.lat.n


def check_frame(lat: FinSupLattice):
    """Frame wrapper if distributive, else the witness triple (x, y, z)."""
    w = lat.distributivity_witness()
    if w is not None:
        return w
    return Frame(lat)


def as_frame(lat: FinSupLattice) -> Frame:
    out = check_frame(lat)
    if not isinstance(out, Frame):
        raise NotAFrame(f"distributivity fails at {out}", out)
    return out


@dataclass(frozen=True)
class FrameHom:
    """A JoinMap between frames that also preserves top and binary meets."""

    map: JoinMap

    @property
    def source(self) -> FinSupLattice:
        return self.map.source

    @property
    def target(self) -> FinSupLattice:
        return self.map.target

    @property
    def values(self) -> np.ndarray:
        return self.map.values

    def __call__(self, x: int) -> int:
        return self.map(x)

    def compose(self, inner: "FrameHom") -> "FrameHom":
        return FrameHom(self.map.compose(inner.map))


def build_frame_hom(src: Frame, tgt: Frame, values) -> FrameHom:
    jm = JoinMap(src.lat, tgt.lat, values)
    w = meet_preservation_witness(src.lat, tgt.lat, jm.values)
    if w is not None:
        raise NotFrameHom(f"meet or top not preserved at {w}", w)
    return FrameHom(jm)


def identity_frame_hom(fr: Frame) -> FrameHom:
    return FrameHom(identity_map(fr.lat))


# --- open maps --------------------------------------------------------------

@dataclass(frozen=True)
class OpenMapReport:
    """Outcome of the openness test for a frame homomorphism f*.

    ``semiopen`` means f* preserves all meets, so the direct image f_!
    (its left adjoint) exists.  ``frobenius`` records whether
    f_!(x & f*(y)) = f_!(x) & y holds everywhere; ``open`` is both.
    """

    semiopen: bool
    frobenius: bool
    open: bool
    direct_image: JoinMap | None
    witness: tuple | None


def check_open_map(h: FrameHom) -> OpenMapReport:
    """Openness of the locale map whose inverse image is ``h``.

    ``h`` maps O(M) -> O(L) for a locale map L -> M; the direct image,
    when it exists, goes O(L) -> O(M).
    """
    src, tgt = h.source, h.target  # src = O(M), tgt = O(L)
    w = meet_preservation_witness(src, tgt, h.values)
    if w is not None:
        return OpenMapReport(False, False, False, None, w)
    # left adjoint of h, as a map O(L) -> O(M)
    f_shriek = left_adjoint(src, tgt, h.values)
    g = f_shriek.values
    # Frobenius: f_!(x & h(y)) = f_!(x) & y for x in O(L), y in O(M)
    m2t, m2s = tgt.meet2, src.meet2
    lhs = g[m2t[:, h.values]]          # lhs[x, y] = f_!(x & h(y))
    rhs = m2s[g[:, None], np.arange(src.n)[None, :]]
    if not np.array_equal(lhs, rhs):
        x, y = np.argwhere(lhs != rhs)[0]
        return OpenMapReport(True, False, False, f_shriek, (int(x), int(y)))
    return OpenMapReport(True, True, True, f_shriek, None)


# --- quotients and subframes -------------------------------------------------

def frame_quotient(fr: Frame, pairs) -> tuple[Frame, FrameHom]:
    """Quotient frame forcing a = b for each pair, with its projection.

    The smallest frame congruence containing the pairs is computed as a
    fixpoint closure under join and meet compatibility; each congruence
    class has a greatest element, and those representatives carry the
    quotient frame.
    """
    lat = fr.lat
    n = lat.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx
            return True
        return False

    for a, b in pairs:
        union(a, b)
    changed = True
    while changed:
        changed = False
        classes = {}
        for x in range(n):
            classes.setdefault(find(x), []).append(x)
        for members in classes.values():
            rep = members[0]
            for other in members[1:]:
                for c in range(n):
                    if union(lat.join(rep, c), lat.join(other, c)):
                        changed = True
                    if union(lat.meet(rep, c), lat.meet(other, c)):
                        changed = True
    classes = {}
    for x in range(n):
        classes.setdefault(find(x), []).append(x)
    # nucleus: each class is join-closed, so it has a greatest element
    nucleus = np.empty(n, dtype=np.int32)
    for members in classes.values():
        rep = lat.join_of(members)
        if find(rep) != find(members[0]):
            raise NotALattice("congruence class not join-closed")  # impossible
        for x in members:
            nucleus[x] = rep
    reps = sorted(set(int(r) for r in nucleus))
    index = {r: i for i, r in enumerate(reps)}
    sub_leq = lat.leq[np.ix_(reps, reps)]
    qlat = FinSupLattice(sub_leq, labels=[lat.labels[r] for r in reps])
    qfr = as_frame(qlat)
    proj = build_frame_hom(fr, qfr, [index[int(nucleus[x])] for x in range(n)])
    return qfr, proj


def sublattice(lat: FinSupLattice, elements) -> tuple[FinSupLattice, JoinMap]:
    """Sublattice on a subset closed under binary joins/meets/top/bottom.

    Returns the new lattice plus the inclusion map into ``lat``.
    """
    elems = sorted(set(int(x) for x in elements))
    eset = set(elems)
    for req in (lat.bottom, lat.top):
        if req not in eset:
            raise NotALattice(f"subset misses {lat.labels[req]}", (req,))
    for x in elems:
        for y in elems:
            if lat.join(x, y) not in eset or lat.meet(x, y) not in eset:
                raise NotALattice("subset not closed under join/meet", (x, y))
    sub = FinSupLattice(lat.leq[np.ix_(elems, elems)],
                        labels=[lat.labels[x] for x in elems])
    incl = JoinMap(sub, lat, np.array(elems, dtype=np.int32), _checked=True)
    return sub, incl


def equalizer_subframe(f: FrameHom, g: FrameHom) -> tuple[Frame, JoinMap]:
    """Subframe {a | f(a) = g(a)} of the common source, with inclusion."""
    if f.source is not g.source or f.target is not g.target:
        raise ValueError("equalizer needs parallel homomorphisms")
    fixed = np.flatnonzero(f.values == g.values)
    sub, incl = sublattice(f.source, fixed)
    return as_frame(sub), incl
