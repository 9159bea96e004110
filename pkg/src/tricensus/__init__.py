"""Parallel triad census engine for large directed graphs."""

from .census import TriadCensus, census_sequential, total_triads, union_traverse
from .generate import (
    DegreeHistogram,
    GenSpec,
    PowerLawFit,
    PRESET_EXPONENTS,
    degree_histogram,
    fit_exponent,
    generate,
    preset_spec,
)
from .graph import (
    CapacityError,
    CompactDigraph,
    EdgeCode,
    EdgeList,
    GraphInputError,
    MAX_NODE_COUNT,
    build_graph,
    decode_entry,
    encode_entry,
    load_binary,
    load_edge_list,
    remap_ids,
    save_binary,
    save_edge_list,
)
from .oracle import (
    OracleCapError,
    OracleReport,
    brute_force_census,
    verify_code_table,
)
from .parallel import (
    CensusOverflowError,
    CensusRun,
    CollapsedSpace,
    RunConfig,
    ShardedCensus,
    WorkUnit,
    census_parallel,
    collapse_iteration_space,
    reduce_shards,
    run_census,
    shard_index,
)
from .tricode import (
    TRIAD_LABELS,
    TriadClass,
    TRICODE_TABLE,
    build_code_table,
    classify_triple,
    config_from_codes,
    iso_tricode,
)

__version__ = "0.1.0"
