"""Independent brute-force reference paths.

The census oracle enumerates every one of the n(n-1)(n-2)/6 node triples
against a dense adjacency matrix: a completely different substrate from the
production CSR merge walk, and no closing formula anywhere (the null count
comes from actually seeing the null triples). The table verifier checks the
64-to-16 classification exhaustively from first principles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .census import TriadCensus, total_triads
from .graph import CompactDigraph, EdgeCode
from .tricode import (
    NODE_PERMUTATIONS,
    TRIAD_CLASS_COUNT,
    TRIAD_LABELS,
    permute_config,
)

__all__ = ["OracleCapError", "OracleReport", "brute_force_census",
           "verify_code_table", "EXPECTED_CLASS_CARDINALITIES"]

DEFAULT_NODE_CAP = 2000

#: How many of the 64 raw configurations fall into each class 1..16.
EXPECTED_CLASS_CARDINALITIES = (1, 6, 3, 3, 3, 6, 6, 6, 6, 2, 3, 3, 3, 6, 6, 1)


class OracleCapError(ValueError):
    """Graph too large for O(n^3) enumeration."""


@dataclass
class OracleReport:
    """Outcome of an exhaustive check; mismatches carry counterexamples."""

    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def record(self, descriptor: str, expected, actual) -> None:
        self.mismatches.append((descriptor, expected, actual))

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "mismatches": [
                {"case": d, "expected": e, "actual": a}
                for d, e, a in self.mismatches
            ],
        }


def brute_force_census(g: CompactDigraph, table: np.ndarray,
                       cap: int = DEFAULT_NODE_CAP) -> TriadCensus:
    """Census by visiting every triple of nodes. O(n^3); capped by `cap`.

    The class of each triple comes straight from the dense adjacency matrix
    and the code table; the result's total is asserted against
    n(n-1)(n-2)/6 rather than assumed.
    """
    n = g.node_count
    if n > cap:
        raise OracleCapError(
            f"{n} nodes exceeds the brute-force cap of {cap}; raise `cap` "
            "explicitly if you really want the O(n^3) enumeration")
    adj = np.zeros((n, n), dtype=np.uint8)
    owners = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.offsets))
    nbrs = g.entries >> 2
    out_arc = (g.entries & int(EdgeCode.OUT)) != 0
    adj[owners[out_arc], nbrs[out_arc]] = 1

    counts = np.zeros(TRIAD_CLASS_COUNT + 1, dtype=np.int64)
    if n >= 3:
        jj, kk = np.triu_indices(n, k=1)
        for i in range(n - 2):
            pos = np.searchsorted(jj, i, side="right")
            j, k = jj[pos:], kk[pos:]
            config = (adj[i, j]
                      | (adj[j, i] << 1)
                      | (adj[i, k] << 2)
                      | (adj[k, i] << 3)
                      | (adj[j, k] << 4)
                      | (adj[k, j] << 5))
            counts += np.bincount(table[config], minlength=TRIAD_CLASS_COUNT + 1)
    total = int(counts.sum())
    assert total == total_triads(n), \
        f"enumerated {total} triples, expected {total_triads(n)}"
    return TriadCensus(n, tuple(int(c) for c in counts[1:]))


def verify_code_table(table: np.ndarray) -> OracleReport:
    """Exhaustively validate a 64-entry classification table.

    Checks relabeling invariance over all 64 x 6 cases, the class count and
    per-class cardinalities, and the fixed anchors: the empty configuration
    is 003, the full one 300, single-arc configurations are 012 and
    single-mutual-dyad configurations are 102.
    """
    report = OracleReport()
    table = np.asarray(table)
    if table.shape != (64,):
        report.record("table shape", (64,), tuple(table.shape))
        return report

    values = sorted({int(x) for x in table})
    if values != list(range(1, TRIAD_CLASS_COUNT + 1)):
        report.record("distinct class indices", list(range(1, 17)), values)

    for config in range(64):
        for perm in NODE_PERMUTATIONS:
            image = permute_config(config, perm)
            if table[image] != table[config]:
                report.record(
                    f"config {config} relabeled by {perm} -> {image}",
                    int(table[config]), int(table[image]))

    cardinalities = [0] * (TRIAD_CLASS_COUNT + 1)
    for config in range(64):
        idx = int(table[config])
        if 1 <= idx <= TRIAD_CLASS_COUNT:
            cardinalities[idx] += 1
    if tuple(cardinalities[1:]) != EXPECTED_CLASS_CARDINALITIES:
        report.record("class cardinalities over 64 configs",
                      EXPECTED_CLASS_CARDINALITIES, tuple(cardinalities[1:]))

    anchors = [(0, 1, TRIAD_LABELS[0]), (63, 16, TRIAD_LABELS[15])]
    anchors += [(1 << b, 2, TRIAD_LABELS[1]) for b in range(6)]
    anchors += [(c, 3, TRIAD_LABELS[2]) for c in (0b000011, 0b001100, 0b110000)]
    for config, expected, label in anchors:
        if int(table[config]) != expected:
            report.record(f"anchor config {config} ({label})",
                          expected, int(table[config]))
    return report
