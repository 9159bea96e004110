"""Triad census container and the sequential edge-driven census.

The sequential census follows existing adjacencies instead of enumerating
all triples: for every adjacent pair (u, v) with u < v it counts the dyadic
triads arising from the pair by formula, walks the merged union of the two
sorted neighbor subarrays to classify connected triads in place, and closes
the null-triad count from the total n(n-1)(n-2)/6 at the end. A connected
triple is counted from exactly one of its adjacent pairs via the canonical
selection predicate ``v < w or (u < w < v and w not adjacent to u)``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass

import numpy as np

from .graph import CompactDigraph, EdgeCode
from .tricode import TRIAD_LABELS, TriadClass

__all__ = ["TriadCensus", "total_triads", "union_traverse", "census_sequential"]


def total_triads(n: int) -> int:
    """Number of triads (including null ones) among n nodes."""
    return n * (n - 1) * (n - 2) // 6


@dataclass(frozen=True)
class TriadCensus:
    """Counts of the 16 triad classes, plus the node count they refer to.

    Counts are plain Python integers, so arbitrarily large graphs cannot
    overflow the stored values.
    """

    n: int
    counts: tuple  # 16 ints, index 0 <-> class 1 ("003")

    def __post_init__(self):
        if len(self.counts) != 16:
            raise ValueError("census requires exactly 16 counters")
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    def __getitem__(self, label: str) -> int:
        return self.counts[TRIAD_LABELS.index(label)]

    def by_class(self, cls: TriadClass) -> int:
        return self.counts[cls.index - 1]

    def total(self) -> int:
        return sum(self.counts)

    def as_dict(self) -> dict:
        return dict(zip(TRIAD_LABELS, self.counts))

    def nonzero(self) -> dict:
        return {k: v for k, v in self.as_dict().items() if v}

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "counts": self.as_dict()})

    @classmethod
    def from_json(cls, text: str) -> "TriadCensus":
        obj = json.loads(text)
        return cls(int(obj["n"]), tuple(int(obj["counts"][k]) for k in TRIAD_LABELS))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["label", "count"])
        for label, count in zip(TRIAD_LABELS, self.counts):
            writer.writerow([label, count])
        return buf.getvalue()

    def checksum(self) -> str:
        payload = f"{self.n}:" + ",".join(map(str, self.counts))
        return hashlib.sha256(payload.encode("ascii")).hexdigest()[:16]

    @classmethod
    def from_class_counts(cls, n: int, by_index: dict) -> "TriadCensus":
        counts = [0] * 16
        for index, value in by_index.items():
            counts[index - 1] = int(value)
        return cls(n, tuple(counts))


def union_traverse(g: CompactDigraph, u: int, v: int, visit) -> int:
    """Walk N(u) and N(v) merged in ascending id order, excluding u and v.

    Two cursors advance through the sorted subarrays; when both contain the
    same node the codes from both sides are delivered together and both
    cursors advance. ``visit(w, u_code, v_code)`` receives the direction code
    of each side (None where w is not adjacent to that side). Returns the
    number of visits, i.e. ``|N(u) union N(v)| - |{u, v}|``.
    """
    su = g.neighbors(u).tolist()
    sv = g.neighbors(v).tolist()
    i, j = 0, 0
    lu, lv = len(su), len(sv)
    visits = 0
    while i < lu or j < lv:
        wu = su[i] >> 2 if i < lu else None
        wv = sv[j] >> 2 if j < lv else None
        if wv is None or (wu is not None and wu < wv):
            w, cu, cv = wu, su[i] & 3, 0
            i += 1
        elif wu is None or wv < wu:
            w, cu, cv = wv, 0, sv[j] & 3
            j += 1
        else:
            w, cu, cv = wu, su[i] & 3, sv[j] & 3
            i += 1
            j += 1
        if w == u or w == v:
            continue
        visits += 1
        visit(w, EdgeCode(cu) if cu else None, EdgeCode(cv) if cv else None)
    return visits


def census_sequential(g: CompactDigraph, table: np.ndarray) -> TriadCensus:
    """Single-threaded census of the whole graph.

    This is the readable reference implementation; the parallel engine must
    reproduce its output exactly. Graphs with fewer than 3 nodes yield the
    all-zero census.
    """
    n = g.node_count
    counts = [0] * 17  # 1-based class indices
    table_list = table.tolist()
    offsets = g.offsets.tolist()
    entries = g.entries.tolist()
    for u in range(n):
        for pos_u in range(offsets[u], offsets[u + 1]):
            packed = entries[pos_u]
            v = packed >> 2
            if v <= u:
                continue
            uv_code = packed & 3
            i, i_end = offsets[u], offsets[u + 1]
            j, j_end = offsets[v], offsets[v + 1]
            union_size = 0
            while i < i_end or j < j_end:
                wu = entries[i] >> 2 if i < i_end else n
                wv = entries[j] >> 2 if j < j_end else n
                if wu < wv:
                    w, cu, cv = wu, entries[i] & 3, 0
                    i += 1
                elif wv < wu:
                    w, cu, cv = wv, 0, entries[j] & 3
                    j += 1
                else:
                    w, cu, cv = wu, entries[i] & 3, entries[j] & 3
                    i += 1
                    j += 1
                if w == u or w == v:
                    continue
                union_size += 1
                # canonical selection: count each connected triple once
                if v < w or (u < w < v and cu == 0):
                    counts[table_list[uv_code | (cu << 2) | (cv << 4)]] += 1
            dyadic = 3 if uv_code == 3 else 2
            counts[dyadic] += n - union_size - 2
    counts[1] = total_triads(n) - sum(counts[2:])
    return TriadCensus(n, tuple(counts[1:]))
