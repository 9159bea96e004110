"""Compiled kernels for the parallel census.

Workers are nogil-compiled functions driven by ordinary Python threads, so
they execute truly concurrently while sharing the immutable graph arrays.
The only shared mutable state is a chunk-claiming cursor and the shard
counter array; both are updated through a genuine atomic fetch-add lowered
to an LLVM ``atomicrmw add`` instruction, so increments are lock-free
read-modify-write operations with no torn or lost updates.
"""

from __future__ import annotations

import numpy as np
from numba import njit, types
from numba.core import cgutils
from numba.extending import intrinsic

# fixed 64-bit pair-mixing constants (golden-ratio multiplier + the
# splitmix64 finalizer), frozen for cross-platform shard determinism
HASH_GOLDEN = 0x9E3779B97F4A7C15
HASH_MIX_1 = 0xBF58476D1CE4E5B9
HASH_MIX_2 = 0x94D049BB133111EB

_U64_GOLDEN = np.uint64(HASH_GOLDEN)
_U64_MIX_1 = np.uint64(HASH_MIX_1)
_U64_MIX_2 = np.uint64(HASH_MIX_2)
_U64_30 = np.uint64(30)
_U64_27 = np.uint64(27)
_U64_31 = np.uint64(31)


@intrinsic
def _atomic_add(typingctx, arr, idx, val):
    """Atomic fetch-add on an element of a 1-D int64 array; returns old value."""
    if not (isinstance(arr, types.Array) and arr.dtype == types.int64 and arr.ndim == 1):
        raise TypeError("atomic add requires a 1-D int64 array")
    sig = types.int64(arr, types.intp, types.int64)

    def codegen(context, builder, signature, args):
        arr_val, idx_val, inc_val = args
        ary = context.make_array(signature.args[0])(context, builder, arr_val)
        ptr = cgutils.get_item_pointer(context, builder, signature.args[0],
                                       ary, [idx_val])
        return builder.atomic_rmw("add", ptr, inc_val, "monotonic")

    return sig, codegen


@njit(nogil=True, cache=True)
def atomic_fetch_add(arr, idx, val):
    return _atomic_add(arr, idx, val)


@njit(nogil=True, inline="always")
def mix_pair(u, v):
    """Deterministic 64-bit mix of a node pair, for shard selection."""
    z = np.uint64(u) * _U64_GOLDEN ^ np.uint64(v)
    z = (z ^ (z >> _U64_30)) * _U64_MIX_1
    z = (z ^ (z >> _U64_27)) * _U64_MIX_2
    return z ^ (z >> _U64_31)


@njit(nogil=True, cache=True)
def shard_index_kernel(u, v, shard_count):
    return np.int64(mix_pair(u, v) % np.uint64(shard_count))


@njit(nogil=True, cache=True)
def census_worker(offsets, entries, table, n, shards, shard_count,
                  cursor, chunk_size, pair_counts, worker_id, private_shards):
    """Claim chunks of the collapsed (node, entry) space and census them.

    Entry index e belongs to the node u with offsets[u] <= e < offsets[u+1];
    it is a live pair when its neighbor id exceeds u. Each live pair runs the
    dyadic count and the merged union walk over the two sorted subarrays,
    applying the canonical-selection predicate so every connected triple is
    counted from exactly one pair. The pair's contributions build up in a
    worker-local scratch vector and flush to the pair's hash-selected shard
    as atomic fetch-adds (or to this worker's own shard with plain stores in
    private mode, where nobody else writes it).
    """
    total = entries.shape[0]
    pairs_done = 0
    local16 = np.zeros(16, dtype=np.int64)
    while True:
        start = atomic_fetch_add(cursor, 0, chunk_size)
        if start >= total:
            break
        end = start + chunk_size
        if end > total:
            end = total
        u = np.searchsorted(offsets, start, side="right") - 1
        for e in range(start, end):
            while offsets[u + 1] <= e:
                u += 1
            packed = entries[e]
            v = packed >> 2
            if v <= u:
                continue
            uv_code = packed & 3
            i, i_end = offsets[u], offsets[u + 1]
            j, j_end = offsets[v], offsets[v + 1]
            union_size = 0
            while i < i_end and j < j_end:
                pu = entries[i]
                pv = entries[j]
                wu = pu >> 2
                wv = pv >> 2
                if wu < wv:
                    w, cu, cv = wu, pu & 3, 0
                    i += 1
                elif wv < wu:
                    w, cu, cv = wv, 0, pv & 3
                    j += 1
                else:
                    w, cu, cv = wu, pu & 3, pv & 3
                    i += 1
                    j += 1
                if w == u or w == v:
                    continue
                union_size += 1
                if v < w or (u < w and w < v and cu == 0):
                    local16[table[uv_code | (cu << 2) | (cv << 4)] - 1] += 1
            while i < i_end:  # drain u's subarray: w adjacent to u only
                pu = entries[i]
                i += 1
                w = pu >> 2
                if w == u or w == v:
                    continue
                union_size += 1
                if v < w:  # cu != 0 disables the second predicate arm
                    local16[table[uv_code | ((pu & 3) << 2)] - 1] += 1
            while j < j_end:  # drain v's subarray: w adjacent to v only
                pv = entries[j]
                j += 1
                w = pv >> 2
                if w == u or w == v:
                    continue
                union_size += 1
                if v < w or (u < w and w < v):  # cu == 0 here
                    local16[table[uv_code | ((pv & 3) << 4)] - 1] += 1
            dyadic = 3 if uv_code == 3 else 2
            local16[dyadic - 1] += n - union_size - 2
            if private_shards:
                base = worker_id * 16
                for s in range(16):
                    if local16[s] != 0:
                        shards[base + s] += local16[s]
                        local16[s] = 0
            else:
                base = shard_index_kernel(u, v, shard_count) * 16
                for s in range(16):
                    if local16[s] != 0:
                        atomic_fetch_add(shards, base + s, local16[s])
                        local16[s] = 0
            pairs_done += 1
    pair_counts[worker_id] = pairs_done


def warm_up():
    """Compile the worker on a two-node graph so benchmarks time only work.

    The graph arrays are marked read-only to match the production signature
    (built graphs are immutable), so this compiles the exact specialization
    real runs dispatch to.
    """
    offsets = np.array([0, 1, 2], dtype=np.int64)
    entries = np.array([(1 << 2) | 1, (0 << 2) | 2], dtype=np.int64)
    table = np.full(64, 1, dtype=np.uint8)
    for arr in (offsets, entries, table):
        arr.setflags(write=False)
    shards = np.zeros(16, dtype=np.int64)
    cursor = np.zeros(1, dtype=np.int64)
    pair_counts = np.zeros(1, dtype=np.int64)
    census_worker(offsets, entries, table, np.int64(2), shards, np.int64(1),
                  cursor, np.int64(2), pair_counts, np.int64(0), False)
    shard_index_kernel(np.int64(1), np.int64(2), np.int64(64))
