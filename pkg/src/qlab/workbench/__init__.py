"""User surface: generators, enumeration oracles, isomorphism search,
the specification DSL, check running, and the command line."""

from .isomorphism import (
    find_based_isomorphism,
    find_groupoid_isomorphism,
    find_lattice_isomorphism,
    find_quantale_isomorphism,
)

__all__ = [
    "find_lattice_isomorphism",
    "find_quantale_isomorphism",
    "find_based_isomorphism",
    "find_groupoid_isomorphism",
]
