"""Brute-force enumeration of supports and based-quantale homomorphisms.

Join-preserving maps out of a finite lattice are determined by their
values on join-irreducibles, so candidates are assignments from the
join-irreducibles that are then extended by joins and kept only when
the extension really preserves joins.  Everything downstream (axiom
filters, classification) reuses the ordinary checkers, so these
enumerations double as an independent cross-check of derive_support
and check_based_hom.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from ..errors import SizeLimitExceeded
from ..lattice import FinSupLattice, JoinMap, join_preservation_witness
from ..limits import DEFAULT_LIMITS, Limits
from ..quantale import (
    BasedQuantale,
    HomReport,
    Support,
    check_based_hom,
    check_support,
    classify_support,
)


def join_maps(src: FinSupLattice, tgt: FinSupLattice,
              limits: Limits = DEFAULT_LIMITS):
    """All join-preserving maps src -> tgt, as value tables."""
    ji = src.join_irreducibles()
    count = tgt.n ** len(ji)
    if count > limits.max_enumeration:
        raise SizeLimitExceeded(
            f"{count} candidate maps exceed the enumeration bound")
    ji_arr = np.array(ji, dtype=np.int32)
    below = src.leq[ji_arr, :]                  # (|ji|, n): ji <= x
    out = []
    for assign in product(range(tgt.n), repeat=len(ji)):
        vals = np.empty(src.n, dtype=np.int32)
        av = np.array(assign, dtype=np.int32)
        for x in range(src.n):
            vals[x] = tgt.join_of(av[below[:, x]])
        if join_preservation_witness(src, tgt, vals) is None:
            out.append(vals)
    # deduplicate: different assignments can extend to the same map
    seen = set()
    unique = []
    for vals in out:
        k = vals.tobytes()
        if k not in seen:
            seen.add(k)
            unique.append(vals)
    return unique


def frame_hom_tables(src: FinSupLattice, tgt: FinSupLattice,
                     limits: Limits = DEFAULT_LIMITS):
    from ..lattice import meet_preservation_witness
    return [v for v in join_maps(src, tgt, limits)
            if meet_preservation_witness(src, tgt, v) is None]


def enumerate_supports(based: BasedQuantale,
                       limits: Limits = DEFAULT_LIMITS) -> list[Support]:
    """Every valid support on the based quantale, classified."""
    out = []
    for vals in join_maps(based.q.lat, based.base.lat, limits):
        sup = check_support(based, JoinMap(based.q.lat, based.base.lat,
                                           vals, _checked=True))
        if sup.valid:
            out.append(classify_support(sup))
    return out


def enumerate_homs(src_inst, tgt_inst,
                   limits: Limits = DEFAULT_LIMITS) -> list:
    """Every based-quantale homomorphism between two instances, with
    strong/support-commuting flags; instances carry optional supports.
    Returns (f1, f0, HomReport) triples."""
    src, tgt = src_inst.based, tgt_inst.based
    f1s = join_maps(src.q.lat, tgt.q.lat, limits)
    f0s = frame_hom_tables(src.base.lat, tgt.base.lat, limits)
    if len(f1s) * len(f0s) > limits.max_enumeration:
        raise SizeLimitExceeded("hom pair count exceeds enumeration bound")
    out = []
    for f1 in f1s:
        for f0 in f0s:
            rep = check_based_hom(src, tgt, f1, f0,
                                  src_support=src_inst.support,
                                  tgt_support=tgt_inst.support)
            if rep.is_hom:
                out.append((f1, f0, rep))
    return out
