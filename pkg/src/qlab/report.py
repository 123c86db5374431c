"""Uniform check results.

Every law evaluated anywhere in the workbench produces a Check: a
verdict plus the first witness per failed axiom (reports favor
debuggability of user-supplied tables over exhaustive listings).
"""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
SKIP = "skipped(size)"


@dataclass(frozen=True)
class Check:
    name: str
    verdict: str
    witnesses: tuple = ()     # ((role, element label), ...)
    law: str = ""             # stable tag naming the law checked
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict != FAIL


def passed(name: str, law: str = "", detail: str = "") -> Check:
    return Check(name, PASS, (), law, detail)


def failed(name: str, witnesses=(), law: str = "", detail: str = "") -> Check:
    return Check(name, FAIL, tuple(witnesses), law, detail)


def skipped(name: str, law: str = "", detail: str = "") -> Check:
    return Check(name, SKIP, (), law, detail)


@dataclass
class ReportSet:
    """An ordered bundle of named checks."""

    checks: list[Check] = field(default_factory=list)

    def add(self, check: Check):
        self.checks.append(check)

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.verdict == FAIL]
