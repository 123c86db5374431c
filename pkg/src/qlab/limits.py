"""Per-operation size guards.

Guards are hard errors or explicit skips, never silent truncation: a
partially computed tensor would quietly break the universal-property
tests that certify the whole construction.  Defaults are sized so the
shipped corpus (everything up to the powerset frame on nine points)
runs; anything larger must be enabled explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Limits:
    # largest lattice the generic constructors will validate
    max_lattice: int = 1024
    # largest quantale whose axiom tables are scanned exhaustively
    max_quantale_scan: int = 1024
    # cell grid |L| * |M| allowed in the tensor closure engine
    max_tensor_cells: int = 1 << 18
    # cell grid beyond which carrier enumeration is refused outright
    max_enum_cells: int = 4096
    # number of bi-ideals an enumerated tensor carrier may reach
    max_tensor_elems: int = 1 << 20
    # cell grid for the blind enumeration oracle (2^cells subsets)
    max_oracle_cells: int = 30
    # candidate maps an enumeration (supports, homs) may generate
    max_enumeration: int = 10_000_000

    def scaled(self, **overrides) -> "Limits":
        return replace(self, **overrides)


DEFAULT_LIMITS = Limits()
