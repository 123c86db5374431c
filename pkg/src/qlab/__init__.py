"""qlab: a finite-model workbench for based quantales, supports,
quantal frames, and open localic groupoids.

Everything is exact finite order arithmetic: structures are validated
exhaustively at construction, laws are decided by complete scans, and
the conversions between quantales and groupoids are checked by explicit
isomorphism search.
"""

from .errors import QlabError, SizeLimitExceeded
from .limits import DEFAULT_LIMITS, Limits

__all__ = ["QlabError", "SizeLimitExceeded", "Limits", "DEFAULT_LIMITS"]
