"""The built-in corpus: every named instance the law suite runs over.

The three hand-built counterexamples (the two three-element chains and
the retract) ship as generators so the check suite cannot drift from
their defining tables.
"""

from __future__ import annotations

from ..limits import DEFAULT_LIMITS, Limits
from . import generators as gen

CORPUS_TEXT = """\
# built-in corpus
generate Q1 = paperQ1()
generate Q2 = paperQ2()
generate RETRACT = retract()
generate TWOTWO = group(1)
generate R1 = rel(1)
generate R2 = rel(2)
generate GZ2 = group(2)
generate TRIV = trivial()
generate P2 = pairgroupoid(2)
generate P3 = pairgroupoid(3)
generate Z2 = zmod(2)
generate PART = partition({0,1},{2})
generate IDPART = partition({0},{1})
check Q1 : all
check Q2 : all
check RETRACT : quantal-frame support stability equivariance unique-support
check TWOTWO : all
check R1 : all
check R2 : all
check GZ2 : all
check TRIV : diagrams etale effective roundtrip
check P2 : diagrams etale effective roundtrip
check P3 : diagrams etale roundtrip
check Z2 : diagrams etale effective roundtrip
check PART : diagrams etale effective roundtrip
check IDPART : diagrams etale effective roundtrip
"""


def quantale_instances(limits: Limits = DEFAULT_LIMITS):
    """Every based-quantale instance with a support, for the law suite."""
    return [
        gen.paperQ1(limits),
        gen.paperQ2(limits),
        gen.retract(limits),
        gen.trivial_quantale(limits),
        gen.zero_endomorphism_base(limits),
        gen.rel(1, limits),
        gen.rel(2, limits),
        gen.group_quantale(2, limits),
    ]


def groupoid_instances(limits: Limits = DEFAULT_LIMITS):
    return [
        ("trivial", gen.trivial_groupoid(limits)),
        ("pair2", gen.pairgroupoid(2, limits)),
        ("zmod2", gen.zmod(2, limits)),
        ("partition-2+1", gen.partition([(0, 1), (2,)], limits)),
        ("partition-1+1", gen.partition([(0,), (1,)], limits)),
    ]
