"""Command-line interface: census, generate, degrees, verify, bench.

Machine-readable results go to stdout or --output files; human logs and
warnings go to stderr. Exit codes: 0 success, 1 input error, 2 verification
failure, 3 internal/overflow error.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys

import numpy as np
import psutil

from . import _kernels
from .census import TriadCensus, census_sequential
from .generate import (
    GenSpec,
    PRESET_EXPONENTS,
    degree_histogram,
    fit_exponent,
    generate,
    preset_spec,
)
from .graph import (
    BINARY_MAGIC,
    CapacityError,
    CompactDigraph,
    GraphInputError,
    build_graph,
    load_binary,
    load_edge_list,
    remap_ids,
    save_binary,
    save_edge_list,
)
from .oracle import OracleCapError, brute_force_census, verify_code_table
from .parallel import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_SHARD_COUNT,
    CensusOverflowError,
    RunConfig,
    run_census,
)
from .tricode import TRIAD_LABELS, TRICODE_TABLE

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2
EXIT_INTERNAL = 3


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _default_threads() -> int:
    return psutil.cpu_count(logical=False) or 1


class _Parser(argparse.ArgumentParser):
    """argparse, but argument problems exit with the input-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_input_args(p, with_build_flags=True):
    p.add_argument("--input", help="edge-list text file or TCSR binary cache")
    if with_build_flags:
        p.add_argument("--nodes", type=int, default=None,
                       help="node-count override (allows isolated trailing ids)")
        p.add_argument("--self-loops", choices=("drop", "reject"), default="drop",
                       help="policy for src==dst pairs (default: drop, counted)")
        p.add_argument("--remap", metavar="PATH", default=None,
                       help="densify sparse ids; writes original ids to PATH, "
                            "one per line (line number = new id)")


def _add_gen_args(p):
    p.add_argument("--preset", choices=sorted(PRESET_EXPONENTS),
                   help="power-law preset (sets the exponent)")
    p.add_argument("--model", choices=("powerlaw", "uniform"),
                   help="generator model when no preset is used")
    p.add_argument("--gen-nodes", type=int, default=None, help="nodes to generate")
    p.add_argument("--gen-arcs", type=int, default=None, help="arcs to generate")
    p.add_argument("--exponent", type=float, default=None,
                   help="power-law exponent (powerlaw model)")
    p.add_argument("--seed", type=int, default=0, help="generator seed")


def _add_run_args(p):
    p.add_argument("--threads", type=int, default=None,
                   help="worker count (default: physical cores)")
    p.add_argument("--shards", type=int, default=DEFAULT_SHARD_COUNT,
                   help=f"census shard count (default {DEFAULT_SHARD_COUNT})")
    p.add_argument("--chunk", type=int, default=DEFAULT_CHUNK_SIZE,
                   help=f"dynamic-scheduling chunk size (default {DEFAULT_CHUNK_SIZE})")
    p.add_argument("--private-shards", action="store_true",
                   help="one private shard per worker instead of hashed atomics")


def _spec_from_args(args) -> GenSpec | None:
    if args.preset is None and args.model is None:
        return None
    if args.preset is not None:
        kwargs = {}
        if args.gen_nodes is not None:
            kwargs["node_count"] = args.gen_nodes
        if args.gen_arcs is not None:
            kwargs["target_arc_count"] = args.gen_arcs
        return preset_spec(args.preset, seed=args.seed, **kwargs)
    if args.gen_nodes is None or args.gen_arcs is None:
        raise GraphInputError("--model requires --gen-nodes and --gen-arcs")
    return GenSpec(model=args.model, node_count=args.gen_nodes,
                   target_arc_count=args.gen_arcs, exponent=args.exponent,
                   seed=args.seed)


def _load_graph(args) -> CompactDigraph:
    spec = _spec_from_args(args) if hasattr(args, "preset") else None
    if getattr(args, "input", None):
        if spec is not None:
            raise GraphInputError("give either --input or generation flags, not both")
        return _load_graph_file(args)
    if spec is not None:
        _log(f"generating {spec.model} graph: n={spec.node_count} "
             f"m={spec.target_arc_count} seed={spec.seed}")
        return build_graph(generate(spec))
    raise GraphInputError("no input: give --input PATH or generation flags")


def _load_graph_file(args) -> CompactDigraph:
    path = args.input
    with open(path, "rb") as fh:
        is_binary = fh.read(4) == BINARY_MAGIC
    if is_binary:
        if getattr(args, "nodes", None) is not None or getattr(args, "remap", None):
            raise GraphInputError("--nodes/--remap do not apply to binary caches")
        return load_binary(path)
    edges = load_edge_list(path)
    if getattr(args, "remap", None):
        edges, mapping = remap_ids(edges)
        with open(args.remap, "w", encoding="ascii") as fh:
            for orig in mapping.tolist():
                fh.write(f"{orig}\n")
        _log(f"remapped {mapping.size} distinct ids; mapping written to {args.remap}")
    g = build_graph(edges, self_loops=getattr(args, "self_loops", "drop"),
                    node_count=getattr(args, "nodes", None))
    if g.self_loops_dropped:
        _log(f"warning: dropped {g.self_loops_dropped} self-loop(s)")
    return g


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _census_text(census: TriadCensus, fmt: str) -> str:
    return census.to_json() if fmt == "json" else census.to_csv()


def cmd_census(args) -> int:
    g = _load_graph(args)
    threads = args.threads or _default_threads()
    shards = threads if args.private_shards else args.shards
    cfg = RunConfig(worker_count=threads, shard_count=shards,
                    chunk_size=args.chunk, private_shards=args.private_shards)
    _kernels.warm_up()
    run = run_census(g, TRICODE_TABLE, cfg)
    _log(f"n={g.node_count} m={g.arc_count} workers={threads} "
         f"wall={run.wall_seconds:.3f}s")
    _emit(_census_text(run.census, args.format), args.output)
    if args.save_binary:
        save_binary(g, args.save_binary)
        _log(f"binary cache written to {args.save_binary}")
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = _spec_from_args(args)
    if spec is None:
        raise GraphInputError("generate requires --preset or --model")
    edges = generate(spec)
    save_edge_list(edges, args.output)
    _log(f"wrote {len(edges)} arcs on {spec.node_count} nodes to {args.output}")
    return EXIT_OK


def cmd_degrees(args) -> int:
    g = _load_graph(args)
    hist = degree_histogram(g, args.direction)
    rows = "\n".join(f"{d},{c}" for d, c in hist.csv_rows()) + "\n"
    if args.fit_kmin is not None:
        fit = fit_exponent(hist, k_min=args.fit_kmin)
        if args.output:
            _emit(rows, args.output)
        print(json.dumps(fit.as_dict()))
    else:
        _emit(rows, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    table_report = verify_code_table(TRICODE_TABLE)
    graphs = []

    specs: list[GenSpec | None]
    if getattr(args, "input", None):
        specs = [None]
    else:
        base = _spec_from_args(args)
        if base is None:
            raise GraphInputError("verify needs --input or generation flags")
        specs = [GenSpec(base.model, base.node_count, base.target_arc_count,
                         base.exponent, base.seed + i)
                 for i in range(args.count)]

    first_divergence = None
    for spec in specs:
        if spec is None:
            g = _load_graph_file(args)
        else:
            g = build_graph(generate(spec))
        if g.node_count > args.cap:
            raise OracleCapError(
                f"{g.node_count} nodes exceeds --cap {args.cap}; brute force refused")
        brute = brute_force_census(g, TRICODE_TABLE, cap=args.cap)
        seq = census_sequential(g, TRICODE_TABLE)
        workers = args.threads or _default_threads()
        cfg = RunConfig(worker_count=workers,
                        shard_count=workers if args.private_shards else args.shards,
                        chunk_size=args.chunk, private_shards=args.private_shards)
        par = run_census(g, TRICODE_TABLE, cfg).census
        agree = brute == seq == par
        entry = {"n": g.node_count, "m": g.arc_count,
                 "seed": None if spec is None else spec.seed, "agree": agree}
        if not agree:
            for label in TRIAD_LABELS:
                trio = (brute[label], seq[label], par[label])
                if len(set(trio)) > 1:
                    entry["first_diff"] = {
                        "class": label, "brute_force": trio[0],
                        "sequential": trio[1], "parallel": trio[2]}
                    first_divergence = (label, trio)
                    break
        graphs.append(entry)

    report = {"table": table_report.as_dict(),
              "graphs": graphs,
              "passed": table_report.passed and all(e["agree"] for e in graphs)}
    print(json.dumps(report, indent=2))
    if not report["passed"]:
        if first_divergence:
            label, trio = first_divergence
            _log(f"verification FAILED: class {label} diverges "
                 f"(brute={trio[0]} seq={trio[1]} par={trio[2]})")
        else:
            _log("verification FAILED: classification table check")
        return EXIT_VERIFY
    _log(f"verification passed on {len(graphs)} graph(s)")
    return EXIT_OK


def cmd_bench(args) -> int:
    g = _load_graph(args)
    thread_list = _parse_thread_list(args.threads)
    if args.repeats < 1:
        raise GraphInputError("--repeats must be >= 1")
    _kernels.warm_up()
    # untimed warm run to fault pages in before measuring
    smallest = min(thread_list)
    run_census(g, TRICODE_TABLE, RunConfig(worker_count=smallest,
                                           shard_count=args.shards,
                                           chunk_size=args.chunk))
    rows = []
    reference: TriadCensus | None = None
    for workers in thread_list:
        cfg = RunConfig(worker_count=workers, shard_count=args.shards,
                        chunk_size=args.chunk)
        times = []
        stats_last = None
        for _ in range(args.repeats):
            run = run_census(g, TRICODE_TABLE, cfg)
            times.append(run.wall_seconds)
            stats_last = run
            if reference is None:
                reference = run.census
            elif run.census != reference:
                _log(f"checksum mismatch at workers={workers}: "
                     f"{run.census.checksum()} != {reference.checksum()}")
                return EXIT_VERIFY
        rows.append({
            "workers": workers,
            "shards": args.shards,
            "chunk": args.chunk,
            "seconds": statistics.median(times),
            "checksum": reference.checksum(),
            "worker_pairs": stats_last.worker_pairs,
            "shard_totals": stats_last.shard_totals,
        })
        _log(f"workers={workers}: median {rows[-1]['seconds']:.3f}s "
             f"over {args.repeats} run(s)")
    base = next((r["seconds"] for r in rows if r["workers"] == 1), None)
    for row in rows:
        row["speedup"] = (base / row["seconds"]) if base else None
    for prev, cur in zip(rows, rows[1:]):
        if cur["workers"] > prev["workers"] and cur["seconds"] > prev["seconds"]:
            _log(f"warning: non-monotone scaling at workers={cur['workers']} "
                 f"({cur['seconds']:.3f}s > {prev['seconds']:.3f}s)")
    result = {
        "graph": {"n": g.node_count, "m": g.arc_count,
                  "source": args.input or "generated"},
        "repeats": args.repeats,
        "rows": rows,
    }
    if args.format == "json":
        _emit(json.dumps(result, indent=2) + "\n", args.output)
    else:
        _emit(_bench_csv(rows), args.output)
    return EXIT_OK


def _bench_csv(rows) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["workers", "shards", "chunk", "seconds", "speedup", "checksum"])
    for r in rows:
        speedup = "" if r["speedup"] is None else f"{r['speedup']:.4f}"
        writer.writerow([r["workers"], r["shards"], r["chunk"],
                         f"{r['seconds']:.6f}", speedup, r["checksum"]])
    return buf.getvalue()


def _parse_thread_list(text: str) -> list[int]:
    try:
        threads = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise GraphInputError(f"bad thread list {text!r}; expected e.g. '1,2,4,8'")
    if not threads or any(t < 1 for t in threads):
        raise GraphInputError(f"thread list must contain positive counts, got {text!r}")
    return threads


def build_parser() -> _Parser:
    parser = _Parser(prog="tricensus",
                     description="Triad census of directed graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", parents=[], help="census a graph")
    _add_input_args(p)
    _add_gen_args(p)
    _add_run_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None, help="write census here (default stdout)")
    p.add_argument("--save-binary", metavar="PATH", default=None,
                   help="also write the built graph as a TCSR binary cache")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("generate", help="write a synthetic edge list")
    _add_gen_args(p)
    p.add_argument("--output", required=True, help="edge-list text file to write")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("degrees", help="degree histogram (CSV), optional fit")
    _add_input_args(p)
    _add_gen_args(p)
    p.add_argument("--direction", choices=("out", "in"), default="out")
    p.add_argument("--output", default=None, help="CSV path (default stdout)")
    p.add_argument("--fit-kmin", type=int, default=None, metavar="KMIN",
                   help="fit a power-law exponent to degrees >= KMIN; "
                        "fit JSON goes to stdout")
    p.set_defaults(func=cmd_degrees)

    p = sub.add_parser("verify", help="brute force vs sequential vs parallel")
    _add_input_args(p)
    _add_gen_args(p)
    _add_run_args(p)
    p.add_argument("--cap", type=int, default=2000,
                   help="refuse brute force beyond this many nodes")
    p.add_argument("--count", type=int, default=1,
                   help="number of generated graphs (seeds seed..seed+count-1)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time the census across worker counts")
    _add_input_args(p)
    _add_gen_args(p)
    p.add_argument("--threads", default="1,2,4,8",
                   help="comma-separated worker counts (default 1,2,4,8)")
    p.add_argument("--shards", type=int, default=DEFAULT_SHARD_COUNT)
    p.add_argument("--chunk", type=int, default=DEFAULT_CHUNK_SIZE)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (GraphInputError, OracleCapError) as exc:
        _log(f"input error: {exc}")
        return EXIT_INPUT
    except FileNotFoundError as exc:
        _log(f"input error: {exc}")
        return EXIT_INPUT
    except (CapacityError, CensusOverflowError) as exc:
        _log(f"capacity error: {exc}")
        return EXIT_INTERNAL
    except ArithmeticError as exc:
        _log(f"internal error: {exc}")
        return EXIT_INTERNAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
