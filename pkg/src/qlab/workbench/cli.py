"""qlab command line.

Exit status is 0 exactly when every selected check passes (skips do
not fail a run; they are reported as skipped(size)).
"""

from __future__ import annotations

import argparse
import re
import sys

import numpy as np

from ..errors import DslError, QlabError, SizeLimitExceeded
from ..groupoid import (
    LocalicGroupoid,
    check_effective_equivalence,
    pair_groupoid_quantale,
    quantale_from_groupoid,
    roundtrip_groupoid,
    roundtrip_quantale,
)
from ..lattice import FinSupLattice, Frame
from ..limits import DEFAULT_LIMITS
from ..quantale import check_principal
from ..tensor import frame_pushout, sup_tensor, tensor_over_base
from . import generators as gen
from .checks import any_failure, report_json, report_text, run_checks
from .corpus import CORPUS_TEXT
from .dsl import build_document, format_document, parse_spec
from .enumeration import enumerate_homs, enumerate_supports
from .generators import QuantaleInstance


def _limits(args):
    lim = DEFAULT_LIMITS
    if getattr(args, "max_size", None):
        n = args.max_size
        lim = lim.scaled(max_lattice=n, max_quantale_scan=n)
    return lim


def _load_named(name: str, limits):
    """A corpus name like rel(2), paperQ1 or partition({0,1},{2})."""
    m = re.fullmatch(r"([A-Za-z0-9_]+)(?:\((.*)\))?", name.strip())
    if not m:
        raise QlabError(f"cannot parse instance name {name!r}")
    kind, argstr = m.group(1), m.group(2) or ""
    args: list = []
    for part in re.findall(r"\{[^}]*\}|[^,{}\s]+", argstr):
        if part.startswith("{"):
            args.append(tuple(p for p in re.split(r"[,\s]+", part[1:-1])
                              if p))
        else:
            args.append(part)
    return gen.generate(kind, tuple(args), limits=limits)


def cmd_parse(args) -> int:
    text = open(args.file, encoding="utf-8").read()
    doc = parse_spec(text)
    sys.stdout.write(format_document(doc))
    return 0


def cmd_check(args) -> int:
    text = open(args.file, encoding="utf-8").read()
    doc = parse_spec(text)
    selection = set(args.select.split(",")) if args.select else None
    rows = run_checks(doc, selection=selection, limits=_limits(args),
                      parallel=args.parallel)
    if args.report == "json":
        sys.stdout.write(report_json(rows, timings=args.timings))
    else:
        sys.stdout.write(report_text(rows, timings=args.timings))
    return 1 if any_failure(rows) else 0


def _describe(obj) -> str:
    if isinstance(obj, QuantaleInstance):
        b = obj.based
        lines = [f"based quantale, {b.n} elements over a {b.base.n}-element "
                 f"base frame",
                 f"quantal frame: {b.quantal_frame}",
                 f"unit: "
                 f"{'none' if b.q.unit is None else b.q.lat.labels[b.q.unit]}"]
        if obj.support is not None:
            lines.append(
                f"support: valid={obj.support.valid} "
                f"stable={obj.support.stable} "
                f"equivariant={obj.support.equivariant}")
        return "\n".join(lines)
    if isinstance(obj, LocalicGroupoid):
        ok = obj.report.all_ok
        return (f"localic groupoid, objects frame {obj.objects.n}, "
                f"arrows frame {obj.arrows.n}, diagrams "
                f"{'pass' if ok else 'FAIL'}")
    if isinstance(obj, Frame):
        return f"frame with {obj.n} elements"
    if isinstance(obj, FinSupLattice):
        return f"sup-lattice with {obj.n} elements"
    return repr(obj)


def cmd_construct(args) -> int:
    limits = _limits(args)
    obj = _load_named(args.name, limits)
    if args.kind == "quantale" and isinstance(obj, LocalicGroupoid):
        oq = quantale_from_groupoid(obj, limits=limits)
        obj = QuantaleInstance(args.name, oq.based, oq.support, oq.reflexive)
    if args.kind == "groupoid" and isinstance(obj, QuantaleInstance):
        from ..groupoid import groupoid_from_quantale
        obj = groupoid_from_quantale(obj.based, obj.support, obj.reflexive,
                                     limits=limits)
    print(_describe(obj))
    return 0


def cmd_roundtrip(args) -> int:
    limits = _limits(args)
    obj = _load_named(args.name, limits)
    if isinstance(obj, LocalicGroupoid):
        _, _, iso = roundtrip_groupoid(obj, limits=limits)
        print("groupoid roundtrip isomorphism found")
    else:
        _, _, iso = roundtrip_quantale(obj.based, obj.support,
                                       obj.reflexive, limits=limits)
        print("quantale roundtrip isomorphism found")
    return 0


def cmd_principal(args) -> int:
    limits = _limits(args)
    obj = _load_named(args.name, limits)
    if isinstance(obj, LocalicGroupoid):
        eff = check_effective_equivalence(obj, limits=limits)
        print(f"effective: {eff.effective} "
              f"(orbit frame {eff.orbit_frame_size}, kernel pair "
              f"{eff.kernel_pair_size}, principality agrees)")
        return 0
    pr = check_principal(obj.based, obj.support, limits=limits)
    print(f"principal: {pr.principal} "
          f"(equalizer {{{', '.join(pr.equalizer_elements)}}})")
    return 0


def cmd_pair(args) -> int:
    limits = _limits(args)
    obj = _load_named(args.name, limits)
    if isinstance(obj, LocalicGroupoid):
        oq = quantale_from_groupoid(obj, limits=limits)
        obj = QuantaleInstance(args.name, oq.based, oq.support, oq.reflexive)
    pq = pair_groupoid_quantale(obj.based, obj.support, obj.reflexive,
                                limits=limits)
    print(f"pair quantale: {pq.based.n} elements over a "
          f"{pq.based.base.n}-element base; groupoid-quantale checks "
          f"{'pass' if pq.report.all_true else 'FAIL'}")
    return 0


def _load_lattice(name: str, limits) -> FinSupLattice:
    obj = _load_named(name, limits)
    if isinstance(obj, Frame):
        return obj.lat
    if isinstance(obj, FinSupLattice):
        return obj
    if isinstance(obj, QuantaleInstance):
        return obj.based.q.lat
    raise QlabError(f"{name!r} is not a lattice-like instance")


def cmd_tensor(args) -> int:
    limits = _limits(args)
    left = _load_lattice(args.left, limits)
    right = _load_lattice(args.right, limits)
    if args.over:
        from ..lattice import as_frame
        base_lat = _load_lattice(args.over, limits)
        base = as_frame(base_lat)
        if base_lat.n == 2:
            # trivial base: top acts as identity, bottom as zero
            ract = np.stack([np.full(left.n, left.bottom, dtype=np.int32),
                             np.arange(left.n, dtype=np.int32)], axis=1)
            lact = np.stack([np.full(right.n, right.bottom, dtype=np.int32),
                             np.arange(right.n, dtype=np.int32)], axis=0)
        elif base_lat.n == left.n == right.n:
            # the frame acting on itself by meets
            ract = base_lat.meet2.copy()
            lact = base_lat.meet2.copy()
        else:
            raise QlabError(
                "tensor --over supports the two-element base or the "
                "self-tensor; arbitrary actions need the library API")
        t = tensor_over_base(left, right, base, ract, lact, limits=limits)
    else:
        t = sup_tensor(left, right, limits=limits)
    print(f"tensor carrier: {t.carrier.n} bi-ideals over a "
          f"{left.n}x{right.n} grid")
    return 0


def cmd_enumerate(args) -> int:
    limits = _limits(args)
    if args.what == "supports":
        inst = _load_named(args.name, limits)
        sups = enumerate_supports(inst.based, limits=limits)
        print(f"{len(sups)} supports")
        for s in sups:
            print(f"  stable={s.stable} equivariant={s.equivariant} "
                  f"table={[inst.based.base.lat.labels[v] for v in s.sigma.values]}")
        return 0
    src = _load_named(args.name, limits)
    tgt = _load_named(args.other or args.name, limits)
    homs = enumerate_homs(src, tgt, limits=limits)
    print(f"{len(homs)} homomorphisms")
    for f1, f0, rep in homs:
        print(f"  strong={rep.strong} support-commuting="
              f"{rep.support_commuting}")
    return 0


def cmd_corpus(args) -> int:
    doc = parse_spec(CORPUS_TEXT)
    rows = run_checks(doc, limits=_limits(args), parallel=args.parallel)
    if args.report == "json":
        sys.stdout.write(report_json(rows, timings=args.timings))
    else:
        sys.stdout.write(report_text(rows, timings=args.timings))
    return 1 if any_failure(rows) else 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="qlab",
        description="finite-model workbench for based quantales and "
                    "open localic groupoids")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("parse", help="parse a spec file and reprint it")
    p.add_argument("file")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("check", help="run checks from a spec file")
    p.add_argument("file")
    p.add_argument("--select", default=None,
                   help="comma-separated check names")
    p.add_argument("--report", choices=("json", "text"), default="text")
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("construct", help="build a named instance")
    p.add_argument("kind", choices=("quantale", "groupoid"))
    p.add_argument("name")
    p.add_argument("--max-size", type=int, default=None)
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("roundtrip", help="convert there and back, then "
                                         "search the isomorphism")
    p.add_argument("name")
    p.add_argument("--max-size", type=int, default=None)
    p.set_defaults(fn=cmd_roundtrip)

    p = sub.add_parser("principal", help="principality / effectiveness")
    p.add_argument("name")
    p.add_argument("--max-size", type=int, default=None)
    p.set_defaults(fn=cmd_principal)

    p = sub.add_parser("pair", help="the pair-groupoid quantale")
    p.add_argument("name")
    p.add_argument("--max-size", type=int, default=None)
    p.set_defaults(fn=cmd_pair)

    p = sub.add_parser("tensor", help="sup-lattice tensor of two lattices")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--over", default=None)
    p.add_argument("--max-size", type=int, default=None)
    p.set_defaults(fn=cmd_tensor)

    p = sub.add_parser("enumerate", help="brute-force enumerations")
    p.add_argument("what", choices=("supports", "homs"))
    p.add_argument("name")
    p.add_argument("other", nargs="?", default=None)
    p.add_argument("--max-size", type=int, default=None)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("corpus", help="run the built-in corpus")
    p.add_argument("action", choices=("run",))
    p.add_argument("--report", choices=("json", "text"), default="text")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(fn=cmd_corpus)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except DslError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SizeLimitExceeded as e:
        print(f"size limit: {e}", file=sys.stderr)
        return 3
    except QlabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
