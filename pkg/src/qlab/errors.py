"""Exception types shared by all qlab modules.

Every validation error carries the first witness tuple that violated the
axiom being checked, as raw element ids.  Callers that want readable
output should translate ids through the structure's label table.
"""

from __future__ import annotations


class QlabError(Exception):
    """Base class for all qlab errors."""

    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness


class SizeLimitExceeded(QlabError):
    """A configured size guard would be exceeded; nothing was computed."""


# --- lattice / frame construction ---------------------------------------

class NotAPartialOrder(QlabError):
    """Antisymmetry fails for the witness pair."""


class NotALattice(QlabError):
    """The witness pair has no least upper bound or greatest lower bound."""


class NotAFrame(QlabError):
    """Distributivity fails at the witness triple."""


class NotJoinPreserving(QlabError):
    """A map table fails bottom or binary-join preservation."""


class NotMeetPreserving(QlabError):
    """A map table fails top or binary-meet preservation."""


class NotFrameHom(QlabError):
    """A map is join-preserving but not meet- or top-preserving."""


# --- quantale construction ----------------------------------------------

class NotAssociative(QlabError):
    pass


class NotBilinear(QlabError):
    """Multiplication fails join preservation in one slot."""


class BadInvolution(QlabError):
    pass


class BadUnit(QlabError):
    pass


class BadAction(QlabError):
    """A base action table violates a module or compatibility axiom."""


class NotUnital(QlabError):
    """The operation requires a multiplication unit and none exists."""


class NotReflexive(QlabError):
    pass


class NoSupport(QlabError):
    """No equivariant support exists; message names the failed axiom."""


# --- tensor machinery ----------------------------------------------------

class NotBimorphism(QlabError):
    """A two-argument table fails join preservation in one slot."""


class NotMiddleLinear(QlabError):
    """A bimorphism is not compatible with the base actions."""


class FactorizationFailure(QlabError):
    """Internal consistency bug: a guaranteed factorization failed."""


# --- cross-check guards (must never fire on valid inputs) ----------------

class EquivalenceMismatch(QlabError):
    """Two formulations that are provably equivalent disagreed."""


class FormMismatch(QlabError):
    """Two equivalent forms of the same law evaluated differently."""


class NotOpen(QlabError):
    """A map required to be open is not."""


class NoIsomorphism(QlabError):
    """No structure isomorphism exists; message carries the certificate."""


class BadGroupTable(QlabError):
    pass


# --- specification DSL ----------------------------------------------------

class DslError(QlabError):
    """Base for parser errors; carries a (line, column) span."""

    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(f"{span[0]}:{span[1]}: {message}")
        self.span = span


class SpecSyntaxError(DslError):
    pass


class UnresolvedName(DslError):
    pass


class DuplicateName(DslError):
    pass
