"""Sup-lattice tensor products realized as closed bi-ideals.

An element of L (x) M is a subset of the cell grid L x M that is
down-closed and closed under joins in each coordinate separately; for a
tensor over a base frame A the subset is additionally saturated under
the exchange rule (x.a, y) in S  iff  (x, a.y) in S.  The closure rules
force every column of such a subset to be a principal downset, so the
engine tracks the column maxima and never scans the grid; the canonical
stored representation of an element is still its cell bitmask, in the
fixed enumeration order cell(x, y) = x * |M| + y.

The pure tensor x (x) y is the literal closure of the single cell
{(x, y)}; every element is a join of pure tensors, which is what the
carrier enumeration exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadAction,
    FactorizationFailure,
    NotAFrame,
    NotBimorphism,
    NotMiddleLinear,
    SizeLimitExceeded,
)
from .lattice import (
    FinSupLattice,
    Frame,
    FrameHom,
    JoinMap,
    as_frame,
    check_frame,
    join_reduce as _join_reduce,
    meet_preservation_witness,
)
from .limits import DEFAULT_LIMITS, Limits


def validate_actions(left: FinSupLattice, right: FinSupLattice, base: Frame,
                     ract: np.ndarray, lact: np.ndarray):
    """Check that ract/lact are unital join-preserving A-module actions.

    ract is |L| x |A| (x, a) -> x.a on the left factor; lact is
    |A| x |M| (a, y) -> a.y on the right factor.
    """
    A = base.lat
    ract = np.asarray(ract, dtype=np.int32)
    lact = np.asarray(lact, dtype=np.int32)
    if ract.shape != (left.n, A.n) or lact.shape != (A.n, right.n):
        raise BadAction("action table shape mismatch")
    if not np.array_equal(ract[:, A.top], np.arange(left.n)):
        raise BadAction("right action is not unital")
    if not np.array_equal(lact[A.top, :], np.arange(right.n)):
        raise BadAction("left action is not unital")
    if not ((ract[left.bottom, :] == left.bottom).all()
            and (ract[:, A.bottom] == left.bottom).all()):
        raise BadAction("right action does not preserve empty joins")
    if not ((lact[:, right.bottom] == right.bottom).all()
            and (lact[A.bottom, :] == right.bottom).all()):
        raise BadAction("left action does not preserve empty joins")
    # join preservation in each slot
    if not np.array_equal(ract[left.join2, :],
                          left.join2[ract[:, None, :], ract[None, :, :]]):
        raise BadAction("right action not join-preserving in the element")
    if not np.array_equal(ract[:, A.join2],
                          left.join2[ract[:, :, None], ract[:, None, :]]):
        raise BadAction("right action not join-preserving in the base")
    if not np.array_equal(lact[:, right.join2],
                          right.join2[lact[:, :, None], lact[:, None, :]]):
        raise BadAction("left action not join-preserving in the element")
    if not np.array_equal(lact[A.join2, :],
                          right.join2[lact[:, None, :], lact[None, :, :]]):
        raise BadAction("left action not join-preserving in the base")
    # module law over the frame multiplication (meet)
    if not np.array_equal(ract[ract, :], ract[:, A.meet2]):
        # (x.a).b = x.(a & b)
        raise BadAction("right action fails the module law")
    for a in range(A.n):
        # b.(a.y) = (b & a).y
        if not np.array_equal(lact[:, lact[a, :]],
                              lact[A.meet2[:, a], :]):
            raise BadAction("left action fails the module law")
    return ract, lact


class TensorSpace:
    """Closure machinery for one (possibly based) tensor cell grid."""

    def __init__(self, left: FinSupLattice, right: FinSupLattice,
                 base: Frame | None = None, ract=None, lact=None,
                 limits: Limits = DEFAULT_LIMITS):
        cells = left.n * right.n
        if cells > limits.max_tensor_cells:
            raise SizeLimitExceeded(
                f"tensor grid {left.n}x{right.n} exceeds cell bound")
        self.left = left
        self.right = right
        self.base = base
        if base is not None:
            self.ract, self.lact = validate_actions(left, right, base,
                                                    ract, lact)
            self.residual = self._residuals()
        else:
            self.ract = self.lact = self.residual = None
        self.cells = cells
        self._colpattern = None
        # row-join scatter plan: column pairs grouped by their join
        nM = right.n
        flat = right.join2.ravel()
        order = np.argsort(flat, kind="stable")
        bounds = np.searchsorted(flat[order], np.arange(nM + 1))
        self._rowjoin_groups = [
            (order[bounds[y]:bounds[y + 1]] // nM,
             order[bounds[y]:bounds[y + 1]] % nM)
            for y in range(nM)]
        if base is not None:
            # exchange scatter plan per base element, grouped by a.y
            self._exch_groups = []
            for a in range(base.lat.n):
                ay = self.lact[a]
                groups = {}
                for y in range(nM):
                    groups.setdefault(int(ay[y]), []).append(y)
                self._exch_groups.append(
                    [(t, np.array(src)) for t, src in sorted(groups.items())])
        self.bottom_cols = self.close(self._blank())

    def _blank(self) -> np.ndarray:
        c = np.full(self.right.n, self.left.bottom, dtype=np.int32)
        c[self.right.bottom] = self.left.top
        return c

    def _residuals(self) -> np.ndarray:
        """residual[a, w] = largest x with x.a <= w."""
        L, A = self.left, self.base.lat
        out = np.empty((A.n, L.n), dtype=np.int32)
        for a in range(A.n):
            below = L.leq[self.ract[:, a], :]           # below[x, w]
            cand = np.where(below, np.arange(L.n)[:, None], L.bottom)
            out[a] = _join_reduce(L, cand, axis=0)
        return out

    def close(self, cols: np.ndarray) -> np.ndarray:
        """Least closed column-max vector dominating ``cols``.

        Column maxima encode the bi-ideal {(x, y) | x <= cols[y]}; the
        passes enforce down-closure across columns, join closure along
        rows, and exchange saturation, iterated to a fixpoint.
        Down-closure and join closure within a column hold by
        representation.
        """
        return self.close_many(cols[None, :])[0]

    def close_many(self, batch: np.ndarray) -> np.ndarray:
        """Close a whole (k, |M|) batch of column-max vectors at once."""
        L, M = self.left, self.right
        c = np.array(batch, dtype=np.int32)
        c[:, M.bottom] = L.top
        bitwise = L.bitwise
        leqM = M.leq
        while True:
            prev = c.copy()
            # columns shrink upward: c[y'] >= c[y] whenever y' <= y
            dom = np.where(leqM[None, :, :], c[:, None, :], L.bottom)
            if bitwise:
                c = np.bitwise_or.reduce(dom, axis=2)
                pm = c[:, :, None] & c[:, None, :]
                for y, (y1, y2) in enumerate(self._rowjoin_groups):
                    c[:, y] |= np.bitwise_or.reduce(pm[:, y1, y2], axis=1)
            else:
                c = _join_reduce(L, dom, axis=2)
                pm = L.meet2[c[:, :, None], c[:, None, :]]
                for y, (y1, y2) in enumerate(self._rowjoin_groups):
                    c[:, y] = L.join2[
                        c[:, y], _join_reduce(L, pm[:, y1, y2], axis=1)]
            if self.base is not None:
                for a in range(self.base.lat.n):
                    # (x.a, y) in S forces (x, a.y) in S
                    moved = self.residual[a][c]
                    if bitwise:
                        for t, src in self._exch_groups[a]:
                            c[:, t] |= np.bitwise_or.reduce(
                                moved[:, src], axis=1)
                    else:
                        for t, src in self._exch_groups[a]:
                            c[:, t] = L.join2[
                                c[:, t],
                                _join_reduce(L, moved[:, src], axis=1)]
                    # (x, a.y) in S forces (x.a, y) in S
                    back = self.ract[c[:, self.lact[a]], a]
                    c = (c | back) if bitwise else L.join2[c, back]
            if np.array_equal(c, prev):
                return c

    # -- element encoding --------------------------------------------------

    def key(self, cols: np.ndarray) -> bytes:
        return cols.astype(np.int32).tobytes()

    def pure_cols(self, x: int, y: int) -> np.ndarray:
        c = self._blank()
        c[y] = self.left.join2[c[y], x]
        return self.close(c)

    def join_cols(self, c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
        return self.close(self.left.join2[c1, c2])

    def meet_cols(self, c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
        return self.left.meet2[c1, c2]  # closed sets meet cellwise

    def leq_cols(self, c1: np.ndarray, c2: np.ndarray) -> bool:
        return bool(self.left.leq[c1, c2].all())

    def contains_cell(self, cols: np.ndarray, x: int, y: int) -> bool:
        return bool(self.left.leq[x, cols[y]])

    def mask_of(self, cols: np.ndarray) -> int:
        """Cell bitmask of the bi-ideal, bit x * |M| + y per cell."""
        if self._colpattern is None:
            nM = self.right.n
            pat = []
            for v in range(self.left.n):
                bits = 0
                for x in np.flatnonzero(self.left.leq[:, v]):
                    bits |= 1 << (int(x) * nM)
                pat.append(bits)
            self._colpattern = pat
        mask = 0
        for y in range(self.right.n):
            mask |= self._colpattern[int(cols[y])] << y
        return mask


@dataclass
class TensorLattice:
    """An enumerated tensor: carrier lattice plus the pure embedding."""

    space: TensorSpace
    carrier: FinSupLattice
    elems: list                      # element id -> column-max vector
    pure: np.ndarray                 # (|L|, |M|) -> element id
    index: dict                      # key bytes -> element id

    @property
    def left(self) -> FinSupLattice:
        return self.space.left

    @property
    def right(self) -> FinSupLattice:
        return self.space.right

    def pure_tensor(self, x: int, y: int) -> int:
        return int(self.pure[x, y])

    def element_of(self, cols: np.ndarray) -> int:
        return self.index[self.space.key(cols)]

    def masks(self) -> list[int]:
        return [self.space.mask_of(c) for c in self.elems]


def _fast_pair_tables(leq: np.ndarray):
    """Join/meet tables for a complete lattice, by rank sweep.

    Assumes every pair has a least upper bound and greatest lower
    bound; FinSupLattice re-verifies the produced tables in full.
    """
    n = leq.shape[0]
    rank = leq.sum(axis=0)
    order = np.argsort(rank, kind="stable")
    join2 = np.full((n, n), -1, dtype=np.int32)
    for k in order:
        ub = leq[:, k][:, None] & leq[:, k][None, :] & (join2 == -1)
        join2[ub] = k
    meet2 = np.full((n, n), -1, dtype=np.int32)
    for k in order[::-1]:
        lb = leq[k, :][:, None] & leq[k, :][None, :] & (meet2 == -1)
        meet2[lb] = k
    return join2, meet2


def _enumerate_carrier(space: TensorSpace, limits: Limits,
                       labels_hint=True) -> TensorLattice:
    left, right = space.left, space.right
    nM = right.n
    if space.cells > limits.max_enum_cells:
        raise SizeLimitExceeded(
            f"tensor grid {left.n}x{right.n} too large to enumerate")
    elems: list[np.ndarray] = []
    index: dict[bytes, int] = {}

    def intern_rows(rows: np.ndarray) -> None:
        rows = np.unique(rows, axis=0)
        for r in rows:
            k = r.tobytes()
            if k not in index:
                if len(elems) >= limits.max_tensor_elems:
                    raise SizeLimitExceeded(
                        "tensor carrier exceeds element bound")
                index[k] = len(elems)
                elems.append(r)

    seeds = np.tile(space._blank(), (left.n * right.n + 1, 1))
    for x in range(left.n):
        for y in range(right.n):
            seeds[x * nM + y, y] = left.join(int(seeds[x * nM + y, y]), x)
    closed_seeds = space.close_many(seeds)
    intern_rows(closed_seeds)
    pure = np.empty((left.n, right.n), dtype=np.int32)
    for x in range(left.n):
        for y in range(right.n):
            pure[x, y] = index[closed_seeds[x * nM + y].tobytes()]

    chunk = max(64, (1 << 22) // max(nM * nM, 1))
    frontier = list(range(len(elems)))
    while frontier:
        base_stack = np.stack(elems)
        new_stack = base_stack[frontier]
        cand = (new_stack[:, None, :] | base_stack[None, :, :]
                if left.bitwise else
                left.join2[new_stack[:, None, :], base_stack[None, :, :]])
        cand = cand.reshape(-1, nM)
        before = len(elems)
        for lo in range(0, cand.shape[0], chunk):
            intern_rows(space.close_many(cand[lo:lo + chunk]))
        frontier = list(range(before, len(elems)))

    # canonical ordering: by cell count, then by column vector
    sizes = [int(left.leq[:, c].sum()) for c in elems]
    perm = sorted(range(len(elems)),
                  key=lambda i: (sizes[i], elems[i].tobytes()))
    renumber = np.empty(len(perm), dtype=np.int32)
    for new, old in enumerate(perm):
        renumber[old] = new
    elems = [elems[old] for old in perm]
    index = {c.tobytes(): i for i, c in enumerate(elems)}
    pure = renumber[pure]

    n = len(elems)
    stack = np.stack(elems)                       # (n, |M|)
    leq = np.empty((n, n), dtype=bool)
    for j in range(n):
        leq[:, j] = left.leq[stack, stack[j]].all(axis=1)
    join2, meet2 = _fast_pair_tables(leq)
    labels = _carrier_labels(space, elems, pure) if labels_hint else None
    carrier = FinSupLattice(leq, labels=labels, join2=join2, meet2=meet2,
                            limits=limits.scaled(max_lattice=max(
                                limits.max_lattice, n)))
    return TensorLattice(space=space, carrier=carrier, elems=elems,
                         pure=pure, index=index)


def _carrier_labels(space: TensorSpace, elems, pure):
    labels = [f"t{i}" for i in range(len(elems))]
    for x in range(space.left.n):
        for y in range(space.right.n):
            i = int(pure[x, y])
            if labels[i].startswith("t"):
                labels[i] = (f"{space.left.labels[x]}(x)"
                             f"{space.right.labels[y]}")
    return labels


def sup_tensor(left: FinSupLattice, right: FinSupLattice,
               limits: Limits = DEFAULT_LIMITS) -> TensorLattice:
    """The sup-lattice tensor product L (x) M as a bi-ideal lattice."""
    return _enumerate_carrier(TensorSpace(left, right, limits=limits), limits)


def tensor_over_base(left: FinSupLattice, right: FinSupLattice, base: Frame,
                     ract, lact,
                     limits: Limits = DEFAULT_LIMITS) -> TensorLattice:
    """Tensor over a base frame: bi-ideals saturated under exchange."""
    space = TensorSpace(left, right, base, ract, lact, limits=limits)
    return _enumerate_carrier(space, limits)


def pure_tensor(t: TensorLattice, x: int, y: int) -> int:
    return t.pure_tensor(x, y)


def induced_map(t: TensorLattice, h, target: FinSupLattice) -> JoinMap:
    """The unique JoinMap from the carrier with induced . pure = h.

    ``h`` is a |L| x |M| table into ``target``; it must preserve joins
    in each slot and, over a base, be middle-linear.
    """
    space = t.space
    left, right = space.left, space.right
    h = np.asarray(h, dtype=np.int32)
    if h.shape != (left.n, right.n):
        raise NotBimorphism("bimorphism table shape mismatch")
    if not np.array_equal(h[left.join2, :],
                          target.join2[h[:, None, :], h[None, :, :]]):
        bad = np.argwhere(h[left.join2, :]
                          != target.join2[h[:, None, :], h[None, :, :]])[0]
        raise NotBimorphism("joins not preserved in the left slot",
                            tuple(map(int, bad)))
    if not np.array_equal(h[:, right.join2],
                          target.join2[h[:, :, None], h[:, None, :]]):
        bad = np.argwhere(h[:, right.join2]
                          != target.join2[h[:, :, None], h[:, None, :]])[0]
        raise NotBimorphism("joins not preserved in the right slot",
                            tuple(map(int, bad)))
    if space.base is not None:
        A = space.base.lat
        for a in range(A.n):
            lhs = h[space.ract[:, a], :]
            rhs = h[:, space.lact[a, :]]
            if not np.array_equal(lhs, rhs):
                x, y = map(int, np.argwhere(lhs != rhs)[0])
                raise NotMiddleLinear(
                    f"h(x.a, y) != h(x, a.y) at (x={x}, a={a}, y={y})",
                    (x, a, y))
    # cumulative column joins: H[v, y] = join of h[x, y] for x <= v
    H = np.empty_like(h)
    for v in range(left.n):
        H[v] = _join_reduce(
            target, np.where(left.leq[:, v][:, None], h, target.bottom),
            axis=0)
    vals = np.empty(t.carrier.n, dtype=np.int32)
    for i, cols in enumerate(t.elems):
        vals[i] = _join_reduce(target, H[cols, np.arange(right.n)], axis=0)
    out = JoinMap(t.carrier, target, vals)
    for x in range(left.n):
        for y in range(right.n):
            if out(t.pure_tensor(x, y)) != h[x, y]:
                raise FactorizationFailure(
                    "induced map does not extend the bimorphism",
                    (x, y))
    return out


@dataclass
class Pushout:
    frame: Frame
    tensor: TensorLattice
    left_inj: FrameHom
    right_inj: FrameHom


def frame_pushout(f: FrameHom, g: FrameHom,
                  limits: Limits = DEFAULT_LIMITS) -> Pushout:
    """Pushout of frames A <-f- E -g-> B, realized as A (x)_E B.

    The base acts by a.e = a & f(e) on the left factor and
    e.b = g(e) & b on the right; injections are a -> a (x) top and
    b -> top (x) b.
    """
    if f.source is not g.source:
        raise ValueError("pushout needs a common source")
    E = as_frame(f.source)
    A, B = f.target, g.target
    ract = A.meet2[np.arange(A.n)[:, None], f.values[None, :]]
    lact = B.meet2[g.values[:, None], np.arange(B.n)[None, :]]
    t = tensor_over_base(A, B, E, ract, lact, limits=limits)
    fr = check_frame(t.carrier)
    if not isinstance(fr, Frame):
        raise NotAFrame("pushout carrier is not distributive", fr)
    inl = JoinMap(A, t.carrier, t.pure[:, B.top])
    inr = JoinMap(B, t.carrier, t.pure[A.top, :])
    for jm, name in ((inl, "left"), (inr, "right")):
        w = meet_preservation_witness(jm.source, jm.target, jm.values)
        if w is not None:
            raise FactorizationFailure(
                f"{name} pushout injection is not a frame homomorphism", w)
    if not np.array_equal(inl.values[f.values], inr.values[g.values]):
        raise FactorizationFailure("pushout square does not commute")
    return Pushout(frame=fr, tensor=t, left_inj=FrameHom(inl),
                   right_inj=FrameHom(inr))


def tensor_oracle(left: FinSupLattice, right: FinSupLattice,
                  base: Frame | None = None, ract=None, lact=None,
                  limits: Limits = DEFAULT_LIMITS) -> list[int]:
    """Blind enumeration of all closed bi-ideals, as sorted cell masks.

    Works directly on subsets of the cell grid with none of the closure
    machinery above; used only to cross-check the constructive path.
    """
    nL, nM = left.n, right.n
    cells = nL * nM
    if cells > limits.max_oracle_cells:
        raise SizeLimitExceeded("oracle grid exceeds bound")
    if base is not None:
        ract = np.asarray(ract, dtype=np.int32)
        lact = np.asarray(lact, dtype=np.int32)

    def bit(x, y):
        return 1 << (x * nM + y)

    cross = 0
    for x in range(nL):
        cross |= bit(x, right.bottom)
    for y in range(nM):
        cross |= bit(left.bottom, y)
    free = [(x, y) for x in range(nL) for y in range(nM)
            if x != left.bottom and y != right.bottom]

    def closed(mask: int) -> bool:
        for x in range(nL):
            for y in range(nM):
                if not mask >> (x * nM + y) & 1:
                    continue
                for x2 in np.flatnonzero(left.leq[:, x]):
                    if not mask >> (int(x2) * nM + y) & 1:
                        return False
                for y2 in np.flatnonzero(right.leq[:, y]):
                    if not mask >> (x * nM + int(y2)) & 1:
                        return False
        for y in range(nM):
            col = [x for x in range(nL) if mask >> (x * nM + y) & 1]
            for x1 in col:
                for x2 in col:
                    if not mask >> (left.join(x1, x2) * nM + y) & 1:
                        return False
        for x in range(nL):
            row = [y for y in range(nM) if mask >> (x * nM + y) & 1]
            for y1 in row:
                for y2 in row:
                    if not mask >> (x * nM + right.join(y1, y2)) & 1:
                        return False
        if base is not None:
            for x in range(nL):
                for a in range(base.n):
                    xa = int(ract[x, a])
                    for y in range(nM):
                        ay = int(lact[a, y])
                        if (mask >> (xa * nM + y) & 1) != \
                                (mask >> (x * nM + ay) & 1):
                            return False
        return True

    out = []
    for pick in range(1 << len(free)):
        mask = cross
        for i, (x, y) in enumerate(free):
            if pick >> i & 1:
                mask |= bit(x, y)
        if closed(mask):
            out.append(mask)
    return sorted(out)
