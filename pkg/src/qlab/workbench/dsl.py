"""The specification DSL: a line-oriented language for declaring finite
lattices, quantales, based structures, supports, groupoids, generator
invocations, and check requests.

Tables for small algebras are written by humans, so everything is
named, errors carry line/column spans, and references must point at
declarations made earlier in the file (which keeps documents acyclic
by construction).

Grammar (``#`` starts a comment, ``;`` separates sections):

    lattice NAME { elems ID+ ; order (ID<=ID)* }
    frame NAME = check LATTICE
    quantale NAME on LATTICE { mult: (ID ID -> ID)* ; inv: (ID -> ID)* ;
                               unit ID? }
    based NAME = QUANTALE over FRAME { lact: (ID ID -> ID)* ;
                                       ract: (ID ID -> ID)* }
    support NAME on BASED { (ID -> ID)* }
    upsilon NAME on BASED { (ID -> ID)* }
    groupoid NAME { objects FRAME ; arrows FRAME ; dstar (ID -> ID)* ;
                    rstar ... ; ustar ... ; istar ... ;
                    mstar (ID -> (ID,ID)+)* }
    generate NAME = GEN(ARGS)
    check NAME : CHECKLIST
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    DuplicateName,
    QlabError,
    SpecSyntaxError,
    UnresolvedName,
)
from ..lattice import (
    as_frame,
    build_frame_hom,
    build_join_map,
    build_sup_lattice,
)
from ..limits import DEFAULT_LIMITS, Limits
from ..quantale import (
    build_based_quantale,
    build_quantale,
    check_reflexive,
    check_support,
    classify_support,
)
from . import generators


TOKEN_RE = re.compile(
    r"(?P<comment>#[^\n]*)"
    r"|(?P<arrow>->)"
    r"|(?P<leq><=)"
    r"|(?P<punct>[{}();:=,])"
    r"|(?P<id>[A-Za-z0-9_.'*+]+(?:-[A-Za-z0-9_.'*+]+)*)"
    r"|(?P<nl>\n)"
    r"|(?P<ws>[ \t\r]+)"
    r"|(?P<bad>.)")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def span(self):
        return (self.line, self.col)


def tokenize(text: str) -> list[Token]:
    out = []
    line, col = 1, 1
    for m in TOKEN_RE.finditer(text):
        kind = m.lastgroup
        tok = m.group()
        if kind == "bad":
            raise SpecSyntaxError(f"unexpected character {tok!r}",
                                  (line, col))
        if kind == "nl":
            out.append(Token("nl", tok, line, col))
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
    return out


# --- declaration forms -----------------------------------------------------

@dataclass(frozen=True)
class LatticeDecl:
    name: str
    elems: tuple
    order: tuple          # pairs of element names
    span: tuple = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class FrameDecl:
    name: str
    lattice: str
    span: tuple = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class QuantaleDecl:
    name: str
    lattice: str
    mult: tuple           # ((x, y, xy), ...)
    inv: tuple            # ((x, x*), ...)
    unit: str | None
    span: tuple = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class BasedDecl:
    name: str
    quantale: str
    frame: str
    lact: tuple
    ract: tuple
    span: tuple = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class MapDecl:
    kind: str             # "support" or "upsilon"
    name: str
    based: str
    entries: tuple
    span: tuple = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class GroupoidDecl:
    name: str
    objects: str
    arrows: str
    dstar: tuple
    rstar: tuple
    ustar: tuple
    istar: tuple
    mstar: tuple | None   # ((q, ((x, y), ...)), ...)
    span: tuple = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class GenerateDecl:
    name: str
    kind: str
    args: tuple           # strings or tuples of strings
    span: tuple = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class CheckDecl:
    name: str
    selection: tuple
    span: tuple = field(compare=False, default=(0, 0))


@dataclass
class SpecDocument:
    declarations: list

    def __eq__(self, other):
        return (isinstance(other, SpecDocument)
                and self.declarations == other.declarations)

    def checks(self) -> list[CheckDecl]:
        return [d for d in self.declarations if isinstance(d, CheckDecl)]


class _Parser:
    """Newlines matter only where the grammar is line-oriented (check
    lists); everywhere else braces delimit declarations and newlines
    are skipped."""

    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.line_mode = False

    def peek(self) -> Token | None:
        pos = self.pos
        while pos < len(self.toks) and not self.line_mode \
                and self.toks[pos].kind == "nl":
            pos += 1
        if not self.line_mode:
            self.pos = pos
        return self.toks[pos] if pos < len(self.toks) else None

    def at_end(self) -> bool:
        return self.peek() is None

    def error(self, msg: str):
        tok = self.peek()
        span = tok.span if tok else (self.toks[-1].line if self.toks else 1,
                                     self.toks[-1].col if self.toks else 1)
        raise SpecSyntaxError(msg, span if isinstance(span, tuple) else
                              (span, 1))

    def take(self, kind=None, text=None) -> Token:
        tok = self.peek()
        if tok is None:
            raise SpecSyntaxError("unexpected end of input",
                                  self.toks[-1].span if self.toks else (1, 1))
        if kind is not None and tok.kind != kind:
            self.error(f"expected {text or kind}, found {tok.text!r}")
        if text is not None and tok.text != text:
            self.error(f"expected {text!r}, found {tok.text!r}")
        self.pos += 1
        return tok

    def take_id(self) -> Token:
        return self.take("id")

    def maybe(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.text == text:
            self.pos += 1
            return True
        return False

    # -- declaration parsers ------------------------------------------

    def document(self) -> SpecDocument:
        decls = []
        while not self.at_end():
            head = self.take_id()
            fn = {
                "lattice": self.lattice_decl,
                "frame": self.frame_decl,
                "quantale": self.quantale_decl,
                "based": self.based_decl,
                "support": lambda t: self.map_decl(t, "support"),
                "upsilon": lambda t: self.map_decl(t, "upsilon"),
                "groupoid": self.groupoid_decl,
                "generate": self.generate_decl,
                "check": self.check_decl,
            }.get(head.text)
            if fn is None:
                raise SpecSyntaxError(
                    f"unknown declaration {head.text!r}", head.span)
            decls.append(fn(head))
        return SpecDocument(decls)

    def lattice_decl(self, head: Token) -> LatticeDecl:
        name = self.take_id().text
        self.take(text="{")
        self.take(text="elems")
        elems = []
        while self.peek() and self.peek().kind == "id":
            elems.append(self.take_id().text)
        self.take(text=";")
        self.take(text="order")
        order = []
        while self.peek() and self.peek().kind == "id":
            a = self.take_id().text
            self.take("leq", "<=")
            b = self.take_id().text
            order.append((a, b))
        self.take(text="}")
        return LatticeDecl(name, tuple(elems), tuple(order), head.span)

    def frame_decl(self, head: Token) -> FrameDecl:
        name = self.take_id().text
        self.take(text="=")
        self.take(text="check")
        lattice = self.take_id().text
        return FrameDecl(name, lattice, head.span)

    def _pairs_to(self) -> tuple:
        out = []
        while self.peek() and self.peek().kind == "id":
            x = self.take_id().text
            self.take("arrow", "->")
            y = self.take_id().text
            out.append((x, y))
        return tuple(out)

    def _triples_to(self) -> tuple:
        out = []
        while self.peek() and self.peek().kind == "id":
            x = self.take_id().text
            y = self.take_id().text
            self.take("arrow", "->")
            z = self.take_id().text
            out.append((x, y, z))
        return tuple(out)

    def quantale_decl(self, head: Token) -> QuantaleDecl:
        name = self.take_id().text
        self.take(text="on")
        lattice = self.take_id().text
        self.take(text="{")
        self.take(text="mult")
        self.take(text=":")
        mult = self._triples_to()
        self.take(text=";")
        self.take(text="inv")
        self.take(text=":")
        inv = self._pairs_to()
        unit = None
        if self.maybe(";"):
            if self.maybe("unit"):
                unit = self.take_id().text
        self.take(text="}")
        return QuantaleDecl(name, lattice, mult, inv, unit, head.span)

    def based_decl(self, head: Token) -> BasedDecl:
        name = self.take_id().text
        self.take(text="=")
        quantale = self.take_id().text
        self.take(text="over")
        frame = self.take_id().text
        self.take(text="{")
        self.take(text="lact")
        self.take(text=":")
        lact = self._triples_to()
        self.take(text=";")
        self.take(text="ract")
        self.take(text=":")
        ract = self._triples_to()
        self.take(text="}")
        return BasedDecl(name, quantale, frame, lact, ract, head.span)

    def map_decl(self, head: Token, kind: str) -> MapDecl:
        name = self.take_id().text
        self.take(text="on")
        based = self.take_id().text
        self.take(text="{")
        entries = self._pairs_to()
        self.take(text="}")
        return MapDecl(kind, name, based, entries, head.span)

    def groupoid_decl(self, head: Token) -> GroupoidDecl:
        name = self.take_id().text
        self.take(text="{")
        self.take(text="objects")
        objects = self.take_id().text
        self.take(text=";")
        self.take(text="arrows")
        arrows = self.take_id().text
        maps = {}
        mstar = None
        while self.maybe(";"):
            if self.peek() and self.peek().text == "}":
                break
            which = self.take_id().text
            if which in ("dstar", "rstar", "ustar", "istar"):
                maps[which] = self._pairs_to()
            elif which == "mstar":
                entries = []
                while self.peek() and self.peek().kind == "id":
                    q = self.take_id().text
                    self.take("arrow", "->")
                    pairs = []
                    while self.peek() and self.peek().text == "(":
                        self.take(text="(")
                        x = self.take_id().text
                        self.take(text=",")
                        y = self.take_id().text
                        self.take(text=")")
                        pairs.append((x, y))
                    entries.append((q, tuple(pairs)))
                mstar = tuple(entries)
            else:
                raise SpecSyntaxError(
                    f"unknown groupoid section {which!r}", head.span)
        self.take(text="}")
        missing = [k for k in ("dstar", "rstar", "ustar", "istar")
                   if k not in maps]
        if missing:
            raise SpecSyntaxError(
                f"groupoid {name} is missing {missing[0]}", head.span)
        return GroupoidDecl(name, objects, arrows, maps["dstar"],
                            maps["rstar"], maps["ustar"], maps["istar"],
                            mstar, head.span)

    def generate_decl(self, head: Token) -> GenerateDecl:
        name = self.take_id().text
        self.take(text="=")
        kind = self.take_id().text
        self.take(text="(")
        args = []
        while not self.maybe(")"):
            if self.maybe("{"):
                block = []
                while not self.maybe("}"):
                    block.append(self.take_id().text)
                    self.maybe(",")
                args.append(tuple(block))
            elif self.maybe("("):
                row = []
                while not self.maybe(")"):
                    row.append(self.take_id().text)
                    self.maybe(",")
                args.append(tuple(row))
            else:
                args.append(self.take_id().text)
            self.maybe(",")
        return GenerateDecl(name, kind, tuple(args), head.span)

    def check_decl(self, head: Token) -> CheckDecl:
        name = self.take_id().text
        self.take(text=":")
        self.line_mode = True
        selection = []
        try:
            while self.peek() and self.peek().kind == "id":
                selection.append(self.take_id().text)
        finally:
            self.line_mode = False
        if not selection:
            self.error("check needs at least one selection entry")
        return CheckDecl(name, tuple(selection), head.span)


def parse_spec(text: str) -> SpecDocument:
    doc = _Parser(tokenize(text)).document()
    _resolve(doc)
    return doc


def _resolve(doc: SpecDocument):
    seen: dict[str, object] = {}
    for d in doc.declarations:
        if isinstance(d, CheckDecl):
            if d.name not in seen:
                raise UnresolvedName(f"unknown structure {d.name!r}", d.span)
            continue
        if d.name in seen:
            raise DuplicateName(f"duplicate name {d.name!r}", d.span)
        refs = []
        if isinstance(d, FrameDecl):
            refs = [d.lattice]
        elif isinstance(d, QuantaleDecl):
            refs = [d.lattice]
        elif isinstance(d, BasedDecl):
            refs = [d.quantale, d.frame]
        elif isinstance(d, MapDecl):
            refs = [d.based]
        elif isinstance(d, GroupoidDecl):
            refs = [d.objects, d.arrows]
        for r in refs:
            if r not in seen:
                raise UnresolvedName(f"unknown reference {r!r}", d.span)
        seen[d.name] = d


# --- printing (round-trip partner of parse_spec) ------------------------------

def format_document(doc: SpecDocument) -> str:
    out = []
    for d in doc.declarations:
        if isinstance(d, LatticeDecl):
            order = " ".join(f"{a}<={b}" for a, b in d.order)
            out.append(f"lattice {d.name} {{ elems {' '.join(d.elems)} ; "
                       f"order {order} }}".rstrip() )
        elif isinstance(d, FrameDecl):
            out.append(f"frame {d.name} = check {d.lattice}")
        elif isinstance(d, QuantaleDecl):
            mult = " ".join(f"{x} {y} -> {z}" for x, y, z in d.mult)
            inv = " ".join(f"{x} -> {y}" for x, y in d.inv)
            tail = f" ; unit {d.unit}" if d.unit else ""
            out.append(f"quantale {d.name} on {d.lattice} {{ mult: {mult} ; "
                       f"inv: {inv}{tail} }}")
        elif isinstance(d, BasedDecl):
            la = " ".join(f"{a} {x} -> {y}" for a, x, y in d.lact)
            ra = " ".join(f"{x} {a} -> {y}" for x, a, y in d.ract)
            out.append(f"based {d.name} = {d.quantale} over {d.frame} "
                       f"{{ lact: {la} ; ract: {ra} }}")
        elif isinstance(d, MapDecl):
            entries = " ".join(f"{x} -> {y}" for x, y in d.entries)
            out.append(f"{d.kind} {d.name} on {d.based} {{ {entries} }}")
        elif isinstance(d, GroupoidDecl):
            parts = [f"objects {d.objects}", f"arrows {d.arrows}"]
            for which in ("dstar", "rstar", "ustar", "istar"):
                entries = " ".join(f"{x} -> {y}"
                                   for x, y in getattr(d, which))
                parts.append(f"{which} {entries}")
            if d.mstar is not None:
                entries = " ".join(
                    f"{q} -> " + " ".join(f"({x},{y})" for x, y in pairs)
                    for q, pairs in d.mstar)
                parts.append(f"mstar {entries}")
            out.append(f"groupoid {d.name} {{ " + " ; ".join(parts) + " }")
        elif isinstance(d, GenerateDecl):
            args = []
            for a in d.args:
                if isinstance(a, tuple):
                    args.append("{" + ",".join(a) + "}")
                else:
                    args.append(a)
            out.append(f"generate {d.name} = {d.kind}({','.join(args)})")
        elif isinstance(d, CheckDecl):
            out.append(f"check {d.name} : {' '.join(d.selection)}")
    return "\n".join(out) + "\n"


# --- building real structures from a document ---------------------------------

def build_document(doc: SpecDocument, limits: Limits = DEFAULT_LIMITS):
    """Instantiate every declaration, in order.  Returns name -> object.

    Lattice declarations yield FinSupLattice, frames yield Frame,
    quantales Quantale, based declarations QuantaleInstance (support
    and unit map attach to it by later declarations), groupoids
    LocalicGroupoid, generate whatever the generator makes.
    """
    from ..groupoid import build_localic_groupoid
    from .generators import QuantaleInstance, generate

    built: dict[str, object] = {}
    lattices: dict[str, object] = {}

    def elem_index(lat, name, span):
        try:
            return lat.labels.index(name)
        except ValueError:
            raise UnresolvedName(f"unknown element {name!r}", span)

    for d in doc.declarations:
        if isinstance(d, LatticeDecl):
            idx = {e: i for i, e in enumerate(d.elems)}
            if len(idx) != len(d.elems):
                raise DuplicateName("repeated element name", d.span)
            pairs = []
            for a, b in d.order:
                if a not in idx or b not in idx:
                    raise UnresolvedName(
                        f"unknown element in order: {a} <= {b}", d.span)
                pairs.append((idx[a], idx[b]))
            lat = build_sup_lattice(len(d.elems), pairs, labels=d.elems,
                                    limits=limits)
            built[d.name] = lat
            lattices[d.name] = lat
        elif isinstance(d, FrameDecl):
            built[d.name] = as_frame(lattices[d.lattice])
        elif isinstance(d, QuantaleDecl):
            lat = lattices[d.lattice]
            mult = np.full((lat.n, lat.n), -1, dtype=np.int32)
            for x, y, z in d.mult:
                mult[elem_index(lat, x, d.span),
                     elem_index(lat, y, d.span)] = elem_index(lat, z, d.span)
            if (mult < 0).any():
                i, j = map(int, np.argwhere(mult < 0)[0])
                raise QlabError(
                    f"{d.name}: product of {lat.labels[i]} and "
                    f"{lat.labels[j]} is not declared")
            inv = np.full(lat.n, -1, dtype=np.int32)
            for x, y in d.inv:
                inv[elem_index(lat, x, d.span)] = elem_index(lat, y, d.span)
            if (inv < 0).any():
                raise QlabError(f"{d.name}: involution is partial")
            unit = None if d.unit is None else elem_index(lat, d.unit, d.span)
            built[d.name] = build_quantale(lat, mult, inv, unit=unit,
                                           limits=limits)
        elif isinstance(d, BasedDecl):
            q = built[d.quantale]
            fr = built[d.frame]
            lact = np.full((fr.n, q.n), -1, dtype=np.int32)
            for a, x, y in d.lact:
                lact[elem_index(fr.lat, a, d.span),
                     elem_index(q.lat, x, d.span)] = \
                    elem_index(q.lat, y, d.span)
            ract = np.full((q.n, fr.n), -1, dtype=np.int32)
            for x, a, y in d.ract:
                ract[elem_index(q.lat, x, d.span),
                     elem_index(fr.lat, a, d.span)] = \
                    elem_index(q.lat, y, d.span)
            if (lact < 0).any() or (ract < 0).any():
                raise QlabError(f"{d.name}: action tables are partial")
            based = build_based_quantale(q, fr, lact, ract, limits=limits)
            built[d.name] = QuantaleInstance(d.name, based, None, None)
        elif isinstance(d, MapDecl):
            inst = built[d.based]
            based = inst.based
            vals = np.full(based.n, -1, dtype=np.int32)
            for x, y in d.entries:
                vals[elem_index(based.q.lat, x, d.span)] = \
                    elem_index(based.base.lat, y, d.span)
            if (vals < 0).any():
                raise QlabError(f"{d.name}: map table is partial")
            if d.kind == "support":
                sup = classify_support(check_support(
                    based, build_join_map(based.q.lat, based.base.lat,
                                          vals)))
                inst.support = sup
                built[d.name] = sup
            else:
                refl = check_reflexive(
                    based,
                    build_frame_hom(as_frame(based.q.lat), based.base, vals),
                    support=inst.support)
                inst.reflexive = refl
                built[d.name] = refl
        elif isinstance(d, GroupoidDecl):
            objects = built[d.objects]
            arrows = built[d.arrows]
            def hom(entries, src, tgt):
                vals = np.full(src.n, -1, dtype=np.int32)
                for x, y in entries:
                    vals[elem_index(src.lat, x, d.span)] = \
                        elem_index(tgt.lat, y, d.span)
                if (vals < 0).any():
                    raise QlabError(f"{d.name}: structure map is partial")
                return build_frame_hom(src, tgt, vals)
            dstar = hom(d.dstar, objects, arrows)
            rstar = hom(d.rstar, objects, arrows)
            ustar = hom(d.ustar, arrows, objects)
            istar = hom(d.istar, arrows, arrows)
            mstar = None
            if d.mstar is not None:
                from ..tensor import TensorSpace
                from ..groupoid import composable_pairs_space
                space = composable_pairs_space(objects, arrows, dstar,
                                               rstar, limits=limits)
                lat = arrows.lat
                mstar = np.empty((lat.n, lat.n), dtype=np.int32)
                given = {}
                for qname, pairs in d.mstar:
                    qi = elem_index(lat, qname, d.span)
                    seed = space._blank()
                    for x, y in pairs:
                        xi = elem_index(lat, x, d.span)
                        yi = elem_index(lat, y, d.span)
                        seed[yi] = lat.join2[seed[yi], xi]
                    given[qi] = space.close(seed)
                if set(given) != set(range(lat.n)):
                    raise QlabError(f"{d.name}: mstar table is partial")
                for qi, cols in given.items():
                    mstar[qi] = cols
            built[d.name] = build_localic_groupoid(
                objects, arrows, dstar, rstar, ustar, istar, mstar=mstar,
                limits=limits)
        elif isinstance(d, GenerateDecl):
            built[d.name] = generate(d.kind, d.args, limits=limits)
        elif isinstance(d, CheckDecl):
            continue
    return built
