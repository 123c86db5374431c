"""Check execution over parsed documents and the built-in corpus.

Every check produces one report row {structure, check, verdict,
witnesses, citation, millis}; rows come out in declaration order, ties
broken by check-suite order, so identical inputs give identical
reports.  The millis field is zeroed in canonical reports and only
carries real timings on request, keeping the JSON byte-reproducible.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from ..errors import NoSupport, QlabError, SizeLimitExceeded
from ..groupoid import (
    LocalicGroupoid,
    check_effective_equivalence,
    pair_groupoid_quantale,
    quantale_from_groupoid,
    roundtrip_groupoid,
    roundtrip_quantale,
)
from ..lattice import FinSupLattice, Frame, check_frame, check_open_map
from ..limits import DEFAULT_LIMITS, Limits
from ..quantale import (
    Quantale,
    check_principal,
    check_unit_laws,
    check_inverse_laws,
    derive_support,
    is_groupoid_quantale,
    partial_units,
    sided_elements,
    unital_reflection,
)
from ..report import Check, FAIL, PASS, SKIP
from .dsl import CheckDecl, SpecDocument, build_document
from .generators import QuantaleInstance


@dataclass(frozen=True)
class ReportRow:
    structure: str
    check: str
    verdict: str
    witnesses: tuple
    citation: str
    millis: int

    def to_dict(self, timings=False):
        return {
            "structure": self.structure,
            "check": self.check,
            "verdict": self.verdict,
            "witnesses": [{"role": role, "element": label}
                          for role, label in self.witnesses],
            "citation": self.citation,
            "millis": self.millis if timings else 0,
        }


def _row(structure: str, check: Check, millis: int) -> ReportRow:
    return ReportRow(structure=structure, check=check.name,
                     verdict=check.verdict, witnesses=check.witnesses,
                     citation=f"law:{check.law or check.name}",
                     millis=millis)


LATTICE_CHECKS = ("frame",)
QUANTALE_CHECKS = ("sided",)
INSTANCE_CHECKS = ("quantal-frame", "support", "stability", "equivariance",
                   "unique-support", "reflexive", "multiplicative",
                   "unit-laws", "inverse-laws", "partial-units",
                   "groupoid-quantale", "principal")
GROUPOID_CHECKS = ("diagrams", "etale", "effective", "roundtrip")


def checks_for(obj) -> tuple:
    if isinstance(obj, (FinSupLattice, Frame)):
        return LATTICE_CHECKS
    if isinstance(obj, Quantale):
        return QUANTALE_CHECKS
    if isinstance(obj, QuantaleInstance):
        return INSTANCE_CHECKS
    if isinstance(obj, LocalicGroupoid):
        return GROUPOID_CHECKS
    return ()


def _run_one(name: str, obj, check: str,
             limits: Limits) -> list[ReportRow]:
    t0 = time.perf_counter()
    out: list[Check] = []
    try:
        out = _dispatch(obj, check, limits)
    except SizeLimitExceeded:
        out = [Check(check, SKIP, (), check)]
    except NoSupport as e:
        out = [Check(check, FAIL, (("reason", str(e)),), check)]
    except QlabError as e:
        out = [Check(check, FAIL, (("error", str(e)),), check)]
    ms = int((time.perf_counter() - t0) * 1000)
    return [_row(name, c, ms) for c in out]


def _dispatch(obj, check: str, limits: Limits) -> list[Check]:
    if check == "frame":
        lat = obj.lat if isinstance(obj, Frame) else obj
        got = check_frame(lat)
        if isinstance(got, Frame):
            return [Check("frame", PASS, (), "frame-distributivity")]
        wit = tuple(("xyz"[k], lat.labels[v]) for k, v in enumerate(got))
        return [Check("frame", FAIL, wit, "frame-distributivity")]

    if check == "sided":
        sided = sided_elements(obj)
        wit = (("right-sided-count", str(len(sided.right))),
               ("two-sided-count", str(len(sided.two))))
        return [Check("sided", PASS, wit, "sided-elements")]

    inst = obj
    if check == "quantal-frame":
        if inst.based.quantal_frame:
            return [Check("quantal-frame", PASS, (), "quantal-frame")]
        return [Check("quantal-frame", FAIL,
                      (("at", str(inst.based.quantal_frame_witness)),),
                      "quantal-frame")]
    if check == "support":
        if inst.support is None:
            return [Check("support", SKIP, (), "support-axioms",
                          "no support declared")]
        reps = ([c for c in inst.support.axioms.checks]
                + [c for c in inst.support.lemmas.checks])
        return reps
    if check == "stability":
        if inst.support is None:
            return [Check("stability", SKIP, (), "stability")]
        ok = bool(inst.support.stable)
        return [Check("stability", PASS if ok else FAIL, (), "stability")]
    if check == "equivariance":
        if inst.support is None:
            return [Check("equivariance", SKIP, (), "equivariance")]
        ok = bool(inst.support.equivariant)
        return [Check("equivariance", PASS if ok else FAIL, (),
                      "equivariance")]
    if check == "unique-support":
        from .enumeration import enumerate_supports
        sups = enumerate_supports(inst.based, limits=limits)
        eq = [s for s in sups if s.equivariant]
        try:
            derived = derive_support(inst.based)
            agrees = (len(eq) == 1 and np.array_equal(
                eq[0].sigma.values, derived.sigma.values))
            return [Check("unique-support", PASS if agrees else FAIL,
                          (("equivariant-count", str(len(eq))),),
                          "support-uniqueness")]
        except NoSupport:
            ok = not eq
            return [Check("unique-support", PASS if ok else FAIL,
                          (("equivariant-count", str(len(eq))),),
                          "support-uniqueness")]
    if check == "reflexive":
        if inst.reflexive is None:
            return [Check("reflexive", SKIP, (), "reflexivity",
                          "no unit map declared")]
        return ([Check("reflexive", PASS, (), "reflexivity")]
                + list(inst.reflexive.lemmas.checks))
    if check == "multiplicative":
        from ..quantale import reduced_multiplication
        red = reduced_multiplication(inst.based, limits=limits)
        ok = red.multiplicative
        wit = () if ok else tuple(("join-at", str(x)) for x in red.witness)
        return [Check("multiplicative", PASS if ok else FAIL, wit,
                      "multiplicativity",
                      f"tensor size {red.tensor.carrier.n}")]
    if check == "unit-laws":
        if inst.reflexive is None:
            return [Check("unit-laws", SKIP, (), "unit-laws")]
        ok, wit = check_unit_laws(inst.based, inst.reflexive)
        return [Check("unit-laws", PASS if ok else FAIL, wit, "unit-laws")]
    if check == "inverse-laws":
        if inst.reflexive is None:
            return [Check("inverse-laws", SKIP, (), "inverse-laws")]
        ok, wit = check_inverse_laws(inst.based, inst.reflexive)
        return [Check("inverse-laws", PASS if ok else FAIL, wit,
                      "inverse-laws")]
    if check == "partial-units":
        if inst.based.q.unit is None:
            return [Check("partial-units", SKIP, (), "partial-units",
                          "not unital")]
        units, covers = partial_units(inst.based.q)
        wit = (("count", str(len(units))),
               ("covers-top", str(covers)))
        reps = [Check("partial-units", PASS, wit, "partial-units")]
        if inst.support is not None:
            ur = unital_reflection(inst.support)
            reps.extend(ur.checks.checks)
        return reps
    if check == "groupoid-quantale":
        if inst.support is None or inst.reflexive is None:
            return [Check("groupoid-quantale", SKIP, (),
                          "groupoid-quantale")]
        rep = is_groupoid_quantale(inst.based, inst.support, inst.reflexive,
                                   limits=limits)
        return list(rep.checks.checks)
    if check == "principal":
        if inst.support is None or not inst.support.equivariant \
                or not inst.based.quantal_frame:
            return [Check("principal", SKIP, (), "principality",
                          "needs an equivariant quantal frame")]
        pr = check_principal(inst.based, inst.support, limits=limits)
        wit = (("equalizer", " ".join(pr.equalizer_elements)),)
        reps = list(pr.checks.checks)
        reps.append(Check("principal", PASS if pr.principal else FAIL,
                          wit, "principality"))
        return reps

    g = obj
    if check == "diagrams":
        return list(g.report.checks)
    if check == "etale":
        rep = check_open_map(g.ustar)
        oq = quantale_from_groupoid(g, limits=limits)
        unital = oq.based.q.unit is not None
        if rep.open != unital:
            return [Check("etale", FAIL,
                          (("unit-map-open", str(rep.open)),
                           ("quantale-unital", str(unital))), "etale")]
        return [Check("etale", PASS,
                      (("etale", str(rep.open)),), "etale")]
    if check == "effective":
        eff = check_effective_equivalence(g, limits=limits)
        wit = (("effective", str(eff.effective)),
               ("orbit-frame-size", str(eff.orbit_frame_size)))
        if eff.etale_complete_note:
            wit += (("note", eff.etale_complete_note),)
        return list(eff.checks.checks) + [
            Check("effective", PASS, wit, "effectiveness")]
    if check == "roundtrip":
        oq, back, iso = roundtrip_groupoid(g, limits=limits)
        _, _, iso2 = roundtrip_quantale(oq.based, oq.support, oq.reflexive,
                                        limits=limits)
        return [Check("roundtrip", PASS, (), "roundtrip-bijection")]

    raise QlabError(f"unknown check {check!r}")


def run_checks(doc: SpecDocument, selection=None,
               limits: Limits = DEFAULT_LIMITS,
               parallel: bool = False) -> list[ReportRow]:
    """Build the document and run the requested checks in order."""
    rows: list[ReportRow] = []
    try:
        built = build_document(doc, limits=limits)
    except QlabError as e:
        return [ReportRow("document", "construction", FAIL,
                          (("error", str(e)),), "law:construction", 0)]
    jobs: list[tuple[str, object, str]] = []
    for decl in doc.checks():
        obj = built.get(decl.name)
        if obj is None:
            continue
        wanted = decl.selection
        available = checks_for(obj)
        if "all" in wanted:
            names = available
        else:
            names = tuple(w for w in wanted)
        for c in names:
            if selection and c not in selection:
                continue
            jobs.append((decl.name, obj, c))
    if parallel:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(
                lambda j: _run_one(j[0], j[1], j[2], limits), jobs))
        for r in results:
            rows.extend(r)
    else:
        for name, obj, c in jobs:
            rows.extend(_run_one(name, obj, c, limits))
    return rows


def report_json(rows: list[ReportRow], timings: bool = False) -> str:
    return json.dumps([r.to_dict(timings=timings) for r in rows],
                      indent=2) + "\n"


def report_text(rows: list[ReportRow], timings: bool = False) -> str:
    out = []
    for r in rows:
        wit = "" if not r.witnesses else \
            "  [" + "; ".join(f"{k}={v}" for k, v in r.witnesses) + "]"
        ms = f"  ({r.millis} ms)" if timings else ""
        out.append(f"{r.verdict:14s} {r.structure}.{r.check}{wit}{ms}")
    fails = sum(1 for r in rows if r.verdict == FAIL)
    out.append(f"{len(rows)} checks, {fails} failures")
    return "\n".join(out) + "\n"


def any_failure(rows: list[ReportRow]) -> bool:
    return any(r.verdict == FAIL for r in rows)
