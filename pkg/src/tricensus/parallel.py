"""Parallel census over a collapsed (node, entry) iteration space.

The imperfectly nested loop over vertices and their adjacency subarrays is
flattened into the single range of global entry indices; workers claim
fixed-size chunks of that range from a shared atomic cursor (dynamic
scheduling), so power-law degree skew balances across workers without any
per-node coordination. Counts accumulate into hash-selected shard vectors
to keep concurrent writers off a single hot census vector, and the shards
are summed after the workers quiesce. Addition commutes, so the result is
exactly identical for every worker/shard/chunk configuration.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .census import TriadCensus, total_triads
from .graph import CompactDigraph

__all__ = [
    "RunConfig",
    "WorkUnit",
    "CollapsedSpace",
    "ShardedCensus",
    "CensusRun",
    "CensusOverflowError",
    "DEFAULT_SHARD_COUNT",
    "DEFAULT_CHUNK_SIZE",
    "shard_index",
    "collapse_iteration_space",
    "census_parallel",
    "run_census",
    "reduce_shards",
]

DEFAULT_SHARD_COUNT = 64
DEFAULT_CHUNK_SIZE = 1024

_U64_MASK = (1 << 64) - 1
_INT64_MAX = (1 << 63) - 1


class CensusOverflowError(OverflowError):
    """A shard counter could exceed its 64-bit accumulator range."""


@dataclass(frozen=True)
class RunConfig:
    """Execution parameters for one parallel census.

    ``private_shards`` switches from hash-sharded counters updated with
    atomic fetch-adds to one counter vector owned by each worker (no
    atomics); it requires ``shard_count == worker_count``. The censused
    output is independent of every field here.
    """

    worker_count: int = 1
    shard_count: int = DEFAULT_SHARD_COUNT
    chunk_size: int = DEFAULT_CHUNK_SIZE
    private_shards: bool = False

    def __post_init__(self):
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if self.shard_count < 1:
            raise ValueError("shard_count must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if self.private_shards and self.shard_count != self.worker_count:
            raise ValueError(
                "private-shard mode requires shard_count == worker_count "
                f"(got {self.shard_count} != {self.worker_count})")


class WorkUnit(tuple):
    """Half-open interval [start, end) of global entry indices."""

    __slots__ = ()

    def __new__(cls, start: int, end: int):
        return super().__new__(cls, (start, end))

    @property
    def start(self) -> int:
        return self[0]

    @property
    def end(self) -> int:
        return self[1]


@dataclass(frozen=True)
class CollapsedSpace:
    """Flattened iteration space of all (node, adjacency-slot) positions.

    A position is a live work item when its entry's neighbor id exceeds the
    owning node, so every adjacent pair with u < v appears exactly once.
    """

    total_entries: int
    live_pair_count: int

    def split(self, chunk_size: int) -> list[WorkUnit]:
        if chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        return [WorkUnit(s, min(s + chunk_size, self.total_entries))
                for s in range(0, self.total_entries, chunk_size)]


def collapse_iteration_space(g: CompactDigraph) -> CollapsedSpace:
    owners = np.repeat(np.arange(g.node_count, dtype=np.int64),
                       np.diff(g.offsets))
    live = int(np.count_nonzero((g.entries >> 2) > owners))
    return CollapsedSpace(total_entries=g.entry_count, live_pair_count=live)


def shard_index(u: int, v: int, shard_count: int) -> int:
    """Shard owning pair (u, v): splitmix64-style mix, uniform over shards.

    Frozen definition (pure 64-bit wrapping arithmetic, platform-independent):
    ``z = (u * 0x9E3779B97F4A7C15) ^ v`` followed by the splitmix64 finalizer,
    reduced modulo ``shard_count``.
    """
    if shard_count < 1:
        raise ValueError("shard_count must be >= 1")
    z = ((u * _kernels.HASH_GOLDEN) ^ v) & _U64_MASK
    z = ((z ^ (z >> 30)) * _kernels.HASH_MIX_1) & _U64_MASK
    z = ((z ^ (z >> 27)) * _kernels.HASH_MIX_2) & _U64_MASK
    z ^= z >> 31
    return z % shard_count


@dataclass
class ShardedCensus:
    """Per-shard census vectors; reduce() closes the census after a run."""

    shards: np.ndarray  # (shard_count, 16) int64
    shard_count: int

    @classmethod
    def allocate(cls, shard_count: int) -> "ShardedCensus":
        return cls(np.zeros((shard_count, 16), dtype=np.int64), shard_count)

    def flat(self) -> np.ndarray:
        return self.shards.reshape(-1)

    def per_shard_totals(self) -> list[int]:
        return [int(t) for t in self.shards.sum(axis=1)]

    def reduce(self, n: int) -> TriadCensus:
        return reduce_shards(self, n)


def reduce_shards(sharded: ShardedCensus, n: int) -> TriadCensus:
    """Sum shard vectors for classes 2..16 and close class 1 by formula."""
    shards = sharded.shards
    if int(shards[:, 0].sum()):
        raise ArithmeticError("null-triad slot must never be accumulated")
    counts = [0] * 16
    for cls in range(1, 16):  # 0-based columns for classes 2..16
        counts[cls] = int(sum(int(x) for x in shards[:, cls]))
    filled = sum(counts[1:])
    null_count = total_triads(n) - filled
    if null_count < 0:
        raise ArithmeticError(
            f"accumulated {filled} triads exceeds the {total_triads(n)} possible")
    counts[0] = null_count
    return TriadCensus(n, tuple(counts))


@dataclass
class CensusRun:
    """One parallel execution: result plus scheduling statistics."""

    census: TriadCensus
    config: RunConfig
    wall_seconds: float
    worker_pairs: list[int] = field(default_factory=list)
    shard_totals: list[int] = field(default_factory=list)


def _check_capacity(g: CompactDigraph, space: CollapsedSpace) -> None:
    """Refuse runs whose counters could exceed int64 instead of wrapping.

    Sound upper bound on any single accumulator: every live pair adds at
    most (n - 2) dyadic triads plus one count per union visit, and union
    visits across all pairs are bounded by the sum of squared degrees.
    """
    n = g.node_count
    degrees = np.diff(g.offsets)
    if degrees.size == 0:
        sum_sq = 0
    elif g.entry_count * int(degrees.max()) <= _INT64_MAX:
        sum_sq = int(np.dot(degrees, degrees))  # provably free of wraparound
    else:
        sum_sq = sum(int(d) * int(d) for d in degrees.tolist())
    bound = space.live_pair_count * max(n - 2, 0) + sum_sq
    if bound > _INT64_MAX:
        raise CensusOverflowError(
            f"worst-case accumulation {bound} exceeds 64-bit counters; "
            "graph too large for this build")


def run_census(g: CompactDigraph, table: np.ndarray, cfg: RunConfig) -> CensusRun:
    """Execute the parallel census and collect run statistics.

    Workers are OS threads driving nogil compiled kernels; the barrier is
    the join of all workers, after which the shards are reduced. Output is
    bit-identical across all configurations.
    """
    space = collapse_iteration_space(g)
    _check_capacity(g, space)
    shard_count = cfg.worker_count if cfg.private_shards else cfg.shard_count
    sharded = ShardedCensus.allocate(shard_count)
    cursor = np.zeros(1, dtype=np.int64)
    pair_counts = np.zeros(cfg.worker_count, dtype=np.int64)
    table = np.ascontiguousarray(table, dtype=np.uint8)

    start = time.perf_counter()
    threads = []
    try:
        for worker_id in range(cfg.worker_count):
            t = threading.Thread(
                target=_kernels.census_worker,
                args=(g.offsets, g.entries, table, np.int64(g.node_count),
                      sharded.flat(), np.int64(shard_count), cursor,
                      np.int64(cfg.chunk_size), pair_counts,
                      np.int64(worker_id), cfg.private_shards),
                name=f"census-worker-{worker_id}", daemon=True)
            t.start()
            threads.append(t)
    except Exception as exc:
        for t in threads:
            t.join()
        raise RuntimeError(f"worker pool initialization failed: {exc}") from exc
    for t in threads:
        t.join()
    wall = time.perf_counter() - start

    census = sharded.reduce(g.node_count)
    processed = [int(p) for p in pair_counts]
    if sum(processed) != space.live_pair_count:
        raise ArithmeticError(
            f"processed {sum(processed)} pairs, expected {space.live_pair_count}")
    return CensusRun(census=census, config=cfg, wall_seconds=wall,
                     worker_pairs=processed,
                     shard_totals=sharded.per_shard_totals())


def census_parallel(g: CompactDigraph, table: np.ndarray, cfg: RunConfig) -> TriadCensus:
    """Parallel census; exactly equal to census_sequential for any config."""
    return run_census(g, table, cfg).census
