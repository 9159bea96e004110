"""Triad configuration encoding and the 64-to-16 isomorphism-class table.

A triple of distinct nodes (u, v, w) has six possible arcs; their presence
is packed into a 6-bit configuration with one fixed bit per arc:

    bit 0: u -> v      bit 2: u -> w      bit 4: v -> w
    bit 1: v -> u      bit 3: w -> u      bit 5: w -> v

This layout lines up with the CSR direction codes so a configuration is
assembled from the pair codes with bit operations alone: the (u, v) code
occupies bits 0-1, the (u, w) code bits 2-3, and the (v, w) code bits 4-5.

The 64 configurations condense into the 16 standard classes, named by their
counts of mutual / asymmetric / null dyads plus an orientation suffix
(D own-star, U in-star, C chain or cycle, T transitive). The lookup table is
not hardcoded: it is derived at import by canonicalizing every configuration
over the 6 relabelings of the triple and matching against one defining
representative per class.
"""

from __future__ import annotations

from itertools import permutations
from typing import NamedTuple

import numpy as np

from .graph import CompactDigraph, GraphInputError

__all__ = [
    "TRIAD_LABELS",
    "TRIAD_CLASS_COUNT",
    "TriadClass",
    "ARC_BITS",
    "NODE_PERMUTATIONS",
    "config_from_codes",
    "config_of_arcs",
    "permute_config",
    "canonical_config",
    "build_code_table",
    "TRICODE_TABLE",
    "iso_tricode",
    "classify_triple",
]

#: Class labels in the standard mutual-asymmetric-null order; index i in the
#: code table means label TRIAD_LABELS[i - 1].
TRIAD_LABELS = (
    "003", "012", "102", "021D", "021U", "021C", "111D", "111U",
    "030T", "030C", "201", "120D", "120U", "120C", "210", "300",
)

TRIAD_CLASS_COUNT = 16

#: Bit position of each directed arc among triple slots (u, v, w) = (0, 1, 2).
ARC_BITS = {
    (0, 1): 0, (1, 0): 1,
    (0, 2): 2, (2, 0): 3,
    (1, 2): 4, (2, 1): 5,
}
_BIT_ARCS = {bit: arc for arc, bit in ARC_BITS.items()}

NODE_PERMUTATIONS = tuple(permutations(range(3)))

# One defining arc set per class over slots (u, v, w). Any triple whose arc
# configuration relabels onto one of these belongs to that class.
_CLASS_ARCS = {
    "003": (),
    "012": ((0, 1),),
    "102": ((0, 1), (1, 0)),
    "021D": ((0, 1), (0, 2)),                      # one node points at both others
    "021U": ((1, 0), (2, 0)),                      # both others point at one node
    "021C": ((0, 1), (1, 2)),                      # two-arc chain
    "111D": ((0, 1), (1, 0), (2, 0)),              # mutual dyad, third points in
    "111U": ((0, 1), (1, 0), (0, 2)),              # mutual dyad points out
    "030T": ((0, 1), (0, 2), (2, 1)),              # transitive triple
    "030C": ((0, 1), (1, 2), (2, 0)),              # cyclic triple
    "201": ((0, 1), (1, 0), (0, 2), (2, 0)),
    "120D": ((0, 1), (1, 0), (2, 0), (2, 1)),
    "120U": ((0, 1), (1, 0), (0, 2), (1, 2)),
    "120C": ((0, 1), (1, 0), (0, 2), (2, 1)),
    "210": ((0, 1), (1, 0), (0, 2), (2, 0), (1, 2)),
    "300": tuple(ARC_BITS),
}


class TriadClass(NamedTuple):
    """One of the 16 isomorphism classes, as (1-based index, label)."""

    index: int
    label: str

    @classmethod
    def from_index(cls, index: int) -> "TriadClass":
        return cls(index, TRIAD_LABELS[index - 1])


def config_from_codes(uv_code: int, uw_code: int, vw_code: int) -> int:
    """Pack three pair codes (0 if the pair is not adjacent) into a config.

    ``uv_code`` and ``uw_code`` are read from u's side, ``vw_code`` from v's.
    """
    return uv_code | (uw_code << 2) | (vw_code << 4)


def config_of_arcs(arcs) -> int:
    """Configuration with exactly the given (slot, slot) arcs present."""
    config = 0
    for arc in arcs:
        config |= 1 << ARC_BITS[arc]
    return config


def permute_config(config: int, perm) -> int:
    """Apply a relabeling of the triple's slots to a configuration."""
    out = 0
    for bit in range(6):
        if config >> bit & 1:
            a, b = _BIT_ARCS[bit]
            out |= 1 << ARC_BITS[(perm[a], perm[b])]
    return out


def canonical_config(config: int) -> int:
    """Smallest configuration reachable by relabeling the triple."""
    return min(permute_config(config, p) for p in NODE_PERMUTATIONS)


def build_code_table() -> np.ndarray:
    """Derive the 64-entry config -> class-index table.

    Every configuration is canonicalized over the 6 slot relabelings and
    matched to the class whose defining representative shares that canonical
    form. The construction fails loudly if the 16 representatives do not
    partition all 64 configurations.
    """
    canon_to_index = {}
    for index, label in enumerate(TRIAD_LABELS, start=1):
        canon = canonical_config(config_of_arcs(_CLASS_ARCS[label]))
        if canon in canon_to_index:
            raise AssertionError(f"class representatives collide at {label}")
        canon_to_index[canon] = index
    table = np.empty(64, dtype=np.uint8)
    for config in range(64):
        canon = canonical_config(config)
        if canon not in canon_to_index:
            raise AssertionError(f"configuration {config} matches no class")
        table[config] = canon_to_index[canon]
    table.setflags(write=False)
    return table


#: The table derived once at import; all census entry points accept a table
#: argument so a caller may substitute an independently verified copy.
TRICODE_TABLE = build_code_table()


def iso_tricode(table: np.ndarray, g: CompactDigraph, u: int, v: int, w: int) -> TriadClass:
    """Classify the triad induced by three distinct nodes.

    Reads the up-to-three pair codes by binary search and looks up the
    packed configuration. Pure function of the graph content; invariant
    under any permutation of (u, v, w).
    """
    if u == v or u == w or v == w:
        raise GraphInputError(f"triad nodes must be distinct, got ({u}, {v}, {w})")
    uv = g.edge_code_between(u, v)
    uw = g.edge_code_between(u, w)
    vw = g.edge_code_between(v, w)
    config = config_from_codes(uv or 0, uw or 0, vw or 0)
    return TriadClass.from_index(int(table[config]))


def classify_triple(g: CompactDigraph, table: np.ndarray, a: int, b: int, c: int) -> TriadClass:
    """Order-insensitive triad classification (shared by census and oracle)."""
    return iso_tricode(table, g, a, b, c)
