"""Direction-encoded CSR storage for directed graphs.

A graph is stored as a single flat array of packed neighbor entries plus an
offsets array. Each entry packs ``(neighbor_id << 2) | code`` where the two
low bits encode the direction of the adjacency as seen from the owning node:
``01`` an arc from owner to neighbor, ``10`` an arc from neighbor to owner,
``11`` both. Every adjacency is stored from both endpoints (with transposed
codes), and each node's entries are sorted by neighbor id so membership
queries are binary searches and unions of two neighborhoods are linear
merges.
"""

from __future__ import annotations

import enum
import struct
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EdgeCode",
    "EdgeList",
    "CompactDigraph",
    "GraphInputError",
    "CapacityError",
    "MAX_NODE_COUNT",
    "encode_entry",
    "decode_entry",
    "build_graph",
    "remap_ids",
    "load_edge_list",
    "save_edge_list",
    "load_binary",
    "save_binary",
    "BINARY_MAGIC",
]


class GraphInputError(ValueError):
    """Malformed or inconsistent input (bad pairs, parse errors, bad queries)."""


class CapacityError(OverflowError):
    """Input exceeds a representation limit (id packing width, counter range)."""


#: Node ids occupy the bits of a signed 64-bit entry above the 2 direction
#: bits, so the largest representable id is 2**61 - 1.
MAX_NODE_COUNT = (1 << 61) - 1


class EdgeCode(enum.IntEnum):
    """Two-bit direction code of a stored adjacency, from the owner's side."""

    OUT = 0b01
    IN = 0b10
    BOTH = 0b11

    @property
    def transposed(self) -> "EdgeCode":
        """The same adjacency as seen from the other endpoint."""
        return EdgeCode(((self & 1) << 1) | (self >> 1))


def encode_entry(neighbor: int, code: int) -> int:
    return (int(neighbor) << 2) | int(code)


def decode_entry(packed: int) -> tuple[int, EdgeCode]:
    return int(packed) >> 2, EdgeCode(int(packed) & 3)


@dataclass
class EdgeList:
    """Raw (src, dst) arc pairs as parallel int64 arrays, before any cleanup."""

    src: np.ndarray
    dst: np.ndarray

    def __post_init__(self):
        self.src = np.ascontiguousarray(self.src, dtype=np.int64)
        self.dst = np.ascontiguousarray(self.dst, dtype=np.int64)
        if self.src.shape != self.dst.shape or self.src.ndim != 1:
            raise GraphInputError("src/dst must be 1-D arrays of equal length")

    @classmethod
    def from_pairs(cls, pairs) -> "EdgeList":
        arr = np.array(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(arr[:, 0].copy(), arr[:, 1].copy())

    def __len__(self) -> int:
        return self.src.shape[0]

    def __iter__(self):
        for s, d in zip(self.src.tolist(), self.dst.tolist()):
            yield s, d

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeList):
            return NotImplemented
        return np.array_equal(self.src, other.src) and np.array_equal(self.dst, other.dst)

    def max_id(self) -> int:
        if len(self) == 0:
            return -1
        return int(max(self.src.max(), self.dst.max()))


@dataclass(frozen=True, eq=False)
class CompactDigraph:
    """Immutable direction-encoded CSR digraph.

    Safe to share across threads without synchronization once built.
    """

    node_count: int
    offsets: np.ndarray  # int64, len node_count + 1
    entries: np.ndarray  # int64 packed (neighbor << 2) | code
    arc_count: int
    self_loops_dropped: int = 0

    def __post_init__(self):
        self.offsets.setflags(write=False)
        self.entries.setflags(write=False)

    def __eq__(self, other) -> bool:
        """Bit-level equality of the stored representation."""
        if not isinstance(other, CompactDigraph):
            return NotImplemented
        return (self.node_count == other.node_count
                and self.arc_count == other.arc_count
                and np.array_equal(self.offsets, other.offsets)
                and np.array_equal(self.entries, other.entries))

    @property
    def entry_count(self) -> int:
        return int(self.entries.shape[0])

    def degree(self, u: int) -> int:
        """Number of stored adjacencies of u (direction-insensitive)."""
        self._check_node(u)
        return int(self.offsets[u + 1] - self.offsets[u])

    def neighbors(self, u: int) -> np.ndarray:
        """The sorted packed-entry subarray of u."""
        self._check_node(u)
        return self.entries[self.offsets[u]:self.offsets[u + 1]]

    def iter_neighbors(self, u: int):
        """Yield (neighbor_id, EdgeCode) for each adjacency of u, ascending."""
        for p in self.neighbors(u).tolist():
            yield p >> 2, EdgeCode(p & 3)

    def edge_code_between(self, u: int, v: int) -> EdgeCode | None:
        """Direction code of the (u, v) adjacency from u's side, or None.

        Binary search over u's sorted subarray.
        """
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise GraphInputError(f"edge query requires distinct nodes, got ({u}, {v})")
        sub = self.neighbors(u)
        pos = np.searchsorted(sub, encode_entry(v, 0))
        if pos < sub.shape[0] and (int(sub[pos]) >> 2) == v:
            return EdgeCode(int(sub[pos]) & 3)
        return None

    def arcs(self) -> EdgeList:
        """Re-extract the deduplicated directed arc set, sorted by (src, dst)."""
        owners = np.repeat(np.arange(self.node_count, dtype=np.int64),
                           np.diff(self.offsets))
        nbrs = self.entries >> 2
        codes = self.entries & 3
        out_mask = (codes & int(EdgeCode.OUT)) != 0
        src, dst = owners[out_mask], nbrs[out_mask]
        order = np.lexsort((dst, src))
        return EdgeList(src[order], dst[order])

    def validate(self) -> None:
        """Full invariant scan; raises AssertionError on violation."""
        n = self.node_count
        assert self.offsets.shape == (n + 1,)
        assert self.offsets[0] == 0 and self.offsets[-1] == self.entry_count
        assert np.all(np.diff(self.offsets) >= 0), "offsets must be non-decreasing"
        owners = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.offsets))
        nbrs = self.entries >> 2
        codes = self.entries & 3
        if self.entry_count:
            assert nbrs.min() >= 0 and nbrs.max() < n, "neighbor id out of range"
            assert np.all(codes != 0), "stored entry without direction bits"
            assert np.all(owners != nbrs), "self-adjacency stored"
            # strictly increasing neighbor ids within each subarray
            same_owner = owners[1:] == owners[:-1]
            assert np.all(self.entries[1:][same_owner] > self.entries[:-1][same_owner])
        # symmetry: (owner, nbr, code) <-> (nbr, owner, transpose(code))
        tcodes = ((codes & 1) << 1) | (codes >> 1)
        fwd = np.lexsort((nbrs, owners))
        rev = np.lexsort((owners, nbrs))
        assert np.array_equal(owners[fwd], nbrs[rev])
        assert np.array_equal(nbrs[fwd], owners[rev])
        assert np.array_equal(codes[fwd], tcodes[rev])
        n_both = int(np.count_nonzero(codes == int(EdgeCode.BOTH)))
        n_dir = self.entry_count - n_both
        assert self.arc_count * 2 == n_dir + 2 * n_both

    def _check_node(self, u) -> None:
        if not 0 <= u < self.node_count:
            raise IndexError(f"node {u} out of range [0, {self.node_count})")


def build_graph(edges: EdgeList, *, self_loops: str = "drop",
                node_count: int | None = None) -> CompactDigraph:
    """Build the immutable CSR representation from raw arc pairs.

    Duplicate identical arcs collapse to one; a reciprocal pair stores a
    single BOTH-coded entry at each endpoint. ``self_loops`` is ``"drop"``
    (default; the number dropped is recorded on the graph) or ``"reject"``.
    ``node_count`` overrides the inferred ``1 + max id`` to allow isolated
    trailing nodes. Building is single-threaded; the result is deterministic
    for any permutation of the input pairs.
    """
    if self_loops not in ("drop", "reject"):
        raise GraphInputError(f"self_loops must be 'drop' or 'reject', got {self_loops!r}")
    src, dst = edges.src, edges.dst
    if len(edges) and (src.min() < 0 or dst.min() < 0):
        bad = int(np.flatnonzero((src < 0) | (dst < 0))[0])
        raise GraphInputError(
            f"negative node id in pair ({int(src[bad])}, {int(dst[bad])})")
    inferred = edges.max_id() + 1
    if node_count is None:
        n = inferred
    else:
        if node_count < inferred:
            raise GraphInputError(
                f"node_count override {node_count} below max id {inferred - 1}")
        n = int(node_count)
    if n > MAX_NODE_COUNT:
        raise CapacityError(
            f"{n} nodes exceeds the packing width limit of {MAX_NODE_COUNT}")

    loops = src == dst
    dropped = int(np.count_nonzero(loops))
    if dropped:
        if self_loops == "reject":
            u = int(src[np.flatnonzero(loops)[0]])
            raise GraphInputError(f"self-loop ({u}, {u}) rejected")
        keep = ~loops
        src, dst = src[keep], dst[keep]

    # dedupe identical arcs
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    if src.shape[0]:
        first = np.empty(src.shape[0], dtype=bool)
        first[0] = True
        first[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
        src, dst = src[first], dst[first]
    arc_count = int(src.shape[0])

    # one half-entry per arc endpoint; reciprocal arcs merge by OR-ing codes,
    # which for one OUT + one IN half equals their sum
    owner = np.concatenate([src, dst])
    nbr = np.concatenate([dst, src])
    code = np.concatenate([
        np.full(arc_count, int(EdgeCode.OUT), dtype=np.int64),
        np.full(arc_count, int(EdgeCode.IN), dtype=np.int64),
    ])
    order = np.lexsort((nbr, owner))
    owner, nbr, code = owner[order], nbr[order], code[order]
    if owner.shape[0]:
        starts = np.empty(owner.shape[0], dtype=bool)
        starts[0] = True
        starts[1:] = (owner[1:] != owner[:-1]) | (nbr[1:] != nbr[:-1])
        start_idx = np.flatnonzero(starts)
        merged_code = np.add.reduceat(code, start_idx)
        owner, nbr = owner[starts], nbr[starts]
        entries = (nbr << 2) | merged_code
    else:
        entries = np.empty(0, dtype=np.int64)

    offsets = np.zeros(n + 1, dtype=np.int64)
    if owner.shape[0]:
        counts = np.bincount(owner, minlength=n)
        np.cumsum(counts, out=offsets[1:])
    return CompactDigraph(node_count=n, offsets=offsets,
                          entries=np.ascontiguousarray(entries, dtype=np.int64),
                          arc_count=arc_count, self_loops_dropped=dropped)


def remap_ids(edges: EdgeList) -> tuple[EdgeList, np.ndarray]:
    """Remap sparse ids to dense 0..n-1.

    Returns the remapped edge list and the mapping array, where
    ``mapping[new_id] = original_id`` (originals in ascending order).
    """
    ids = np.concatenate([edges.src, edges.dst])
    mapping, inverse = np.unique(ids, return_inverse=True)
    m = len(edges)
    return EdgeList(inverse[:m].astype(np.int64), inverse[m:].astype(np.int64)), mapping


# -- edge-list text format: "src dst" per line, '#' comment lines ignored --

def load_edge_list(path) -> EdgeList:
    """Parse a whitespace-separated src/dst text file (SNAP style)."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # loadtxt warns on empty input
            arr = np.loadtxt(path, dtype=np.int64, comments="#", ndmin=2)
        if arr.size == 0:
            return EdgeList(np.empty(0, np.int64), np.empty(0, np.int64))
        if arr.shape[1] != 2:
            raise ValueError("expected two columns")
        return EdgeList(arr[:, 0].copy(), arr[:, 1].copy())
    except (ValueError, OverflowError):
        pass  # re-parse below to report the offending line
    srcs, dsts = [], []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise GraphInputError(
                    f"{path}: line {lineno}: expected 'src dst', got {stripped!r}")
            try:
                s, d = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphInputError(
                    f"{path}: line {lineno}: non-integer field in {stripped!r}") from None
            srcs.append(s)
            dsts.append(d)
    return EdgeList(np.array(srcs, dtype=np.int64), np.array(dsts, dtype=np.int64))


def save_edge_list(edges: EdgeList, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# directed edge list: {len(edges)} arcs\n")
        np.savetxt(fh, np.column_stack([edges.src, edges.dst]), fmt="%d %d")


# -- binary cache format ----------------------------------------------------
#
# little-endian: magic "TCSR", u32 version, u64 node_count, u64 entry_count,
# u64 arc_count, then offsets and entries as int64. Bit-exact across runs.

BINARY_MAGIC = b"TCSR"
_BINARY_VERSION = 1
_HEADER = struct.Struct("<4sIQQQ")


def save_binary(g: CompactDigraph, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(BINARY_MAGIC, _BINARY_VERSION,
                              g.node_count, g.entry_count, g.arc_count))
        fh.write(g.offsets.astype("<i8", copy=False).tobytes())
        fh.write(g.entries.astype("<i8", copy=False).tobytes())


def load_binary(path) -> CompactDigraph:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise GraphInputError(f"{path}: truncated header")
        magic, version, n, entry_count, arc_count = _HEADER.unpack(head)
        if magic != BINARY_MAGIC:
            raise GraphInputError(f"{path}: bad magic {magic!r}")
        if version != _BINARY_VERSION:
            raise GraphInputError(f"{path}: unsupported version {version}")
        offsets = np.fromfile(fh, dtype="<i8", count=n + 1).astype(np.int64)
        entries = np.fromfile(fh, dtype="<i8", count=entry_count).astype(np.int64)
    if offsets.shape[0] != n + 1 or entries.shape[0] != entry_count:
        raise GraphInputError(f"{path}: truncated body")
    return CompactDigraph(node_count=int(n), offsets=offsets, entries=entries,
                          arc_count=int(arc_count))
