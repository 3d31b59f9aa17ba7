"""Command-line front end: build, query, stats, bench, gen-weights, update.

Exit codes: 0 success (an empty community included), 1 usage error,
2 data error (unreadable or malformed input, unknown vertex, stale index),
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import random
import re
import statistics
import sys
import time
from dataclasses import dataclass, field

from .bigraph import (
    BipartiteGraph,
    GraphFormatError,
    UnknownVertexError,
    format_weight,
    generate_weights,
    graph_stats,
    load_graph,
    parse_distribution,
)
from .ccindex import (
    VARIANTS,
    CommunityIndex,
    IndexFormatError,
    StaleIndexError,
    build_index,
    index_to_bytes,
    load_index,
    query_community,
    save_index,
)
from .decomp import core_mask, community_online, core_numbers
from .maintain import delete_edge, insert_edge
from .sigsearch import (
    baseline_significant,
    binary_significant,
    expand_significant,
    format_community,
    peel_significant,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

ALGOS = ("community", "peel", "expand", "binary", "baseline", "online")
BENCH_ALGOS = ("community", "peel", "expand", "binary", "baseline")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_graph(path: str) -> BipartiteGraph:
    try:
        return load_graph(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


_SPEC = re.compile(r"^\s*(?:(\d+(?:\.\d*)?|\.\d+)\s*\*\s*)?delta\s*$")


def resolve_param(spec: str, delta: int) -> int:
    """``3`` or ``c*delta`` (rounded half up, at least 1)."""
    spec = str(spec)
    if spec.strip().isdigit():
        value = int(spec)
    else:
        m = _SPEC.match(spec)
        if not m:
            raise UsageError(f"invalid alpha/beta spec {spec!r}; use an integer or c*delta")
        c = float(m.group(1)) if m.group(1) else 1.0
        value = math.floor(c * delta + 0.5)
    if value < 1:
        value = 1
    return value


# ---------------------------------------------------------------------------
# commands


def cmd_build(args) -> int:
    graph = _read_graph(args.input)
    t0 = time.perf_counter()
    index = build_index(graph, args.type)
    elapsed = time.perf_counter() - t0
    size = save_index(index, args.output)
    _say(f"built {args.type} index: levels={len(index.levels)} entries={index.entry_count()} "
         f"bytes={size} time={elapsed:.3f}s")
    return EXIT_OK


def _run_query(algo: str, index: CommunityIndex | None, graph: BipartiteGraph | None, q, alpha,
               beta, epsilon):
    if algo == "community":
        result = query_community(index, q, alpha, beta)
        return result.community, result.reads
    if algo == "online":
        community = community_online(graph, q, alpha, beta)
        return community, graph.m
    if algo == "peel":
        sc = peel_significant(index, q, alpha, beta)
    elif algo == "expand":
        sc = expand_significant(index, q, alpha, beta, epsilon)
    elif algo == "binary":
        sc = binary_significant(index, q, alpha, beta)
    else:
        sc = baseline_significant(graph, q, alpha, beta, epsilon)
    return sc, sc.edges_touched


def cmd_query(args) -> int:
    needs_graph = args.algo in ("online", "baseline")
    if needs_graph and not args.input:
        raise UsageError(f"--algo {args.algo} needs --input")
    if not needs_graph and not args.index:
        raise UsageError(f"--algo {args.algo} needs --index")
    index = load_index(args.index) if args.index else None
    graph = _read_graph(args.input) if args.input else None
    if index is not None and graph is not None:
        index.check_graph(graph)
    names = index if index is not None else graph
    names.vid(args.q)
    community, touched = _run_query(args.algo, index, graph, args.q, args.alpha, args.beta,
                                    args.epsilon)
    _write_text(args.output, format_community(community, names))
    f = getattr(community, "significance", None)
    if f is None and community:
        f = min(e[2] for e in community.edges)
    shown = "none" if f is None else format_weight(f)
    _say(f"f={shown} edges={len(community)} vertices={len(community.vertices())} "
         f"edges_touched={touched}")
    return EXIT_OK


def cmd_stats(args) -> int:
    graph = _read_graph(args.input)
    if graph.m == 0:
        raise DataError("graph has no edges")
    print(json.dumps(dataclasses.asdict(graph_stats(graph))))
    return EXIT_OK


@dataclass
class AlgoTiming:
    algo: str
    times: list[float] = field(default_factory=list)
    touched: list[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.times)

    def row(self) -> dict:
        return {
            "algo": self.algo,
            "queries": self.count,
            "mean_s": statistics.fmean(self.times) if self.times else 0.0,
            "median_s": statistics.median(self.times) if self.times else 0.0,
            "stddev_s": statistics.pstdev(self.times) if self.times else 0.0,
            "mean_edges_touched": statistics.fmean(self.touched) if self.touched else 0.0,
        }


@dataclass
class BenchReport:
    index_type: str
    alpha: int
    beta: int
    build_s: float
    entries: int
    index_bytes: int
    queries: list[int]
    algos: dict[str, AlgoTiming]

    COLUMNS = ("algo", "queries", "mean_s", "median_s", "stddev_s", "mean_edges_touched",
               "index_type", "alpha", "beta", "build_s", "entries", "index_bytes")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.COLUMNS, lineterminator="\n")
        writer.writeheader()
        shared = {"index_type": self.index_type, "alpha": self.alpha, "beta": self.beta,
                  "build_s": f"{self.build_s:.6f}", "entries": self.entries,
                  "index_bytes": self.index_bytes}
        for timing in self.algos.values():
            row = timing.row()
            for k in ("mean_s", "median_s", "stddev_s"):
                row[k] = f"{row[k]:.6g}"
            row["mean_edges_touched"] = f"{row['mean_edges_touched']:.2f}"
            writer.writerow({**row, **shared})
        return buf.getvalue()


def sample_queries(graph: BipartiteGraph, alpha: int, beta: int, count: int, seed: int) -> list[int]:
    """``count`` vertices of the (alpha, beta)-core drawn with replacement under ``seed``."""
    alive = core_mask(graph, alpha, beta)
    pool = [x for x in graph.vertices() if alive[x]]
    if not pool:
        raise DataError(f"the ({alpha},{beta})-core is empty; no queries to sample")
    rng = random.Random(seed)
    return [rng.choice(pool) for _ in range(count)]


def run_bench(graph: BipartiteGraph, alpha_spec: str, beta_spec: str, count: int, seed: int,
              index_type: str = "degeneracy", epsilon: float = 2.0) -> BenchReport:
    delta = max(core_numbers(graph), default=0)
    alpha, beta = resolve_param(alpha_spec, delta), resolve_param(beta_spec, delta)
    t0 = time.perf_counter()
    index = build_index(graph, index_type)
    build_s = time.perf_counter() - t0
    queries = sample_queries(graph, alpha, beta, count, seed)
    algos = {a: AlgoTiming(a) for a in BENCH_ALGOS}
    for q in queries:
        for name, timing in algos.items():
            t0 = time.perf_counter()
            _, touched = _run_query(name, index, graph, q, alpha, beta, epsilon)
            timing.times.append(time.perf_counter() - t0)
            timing.touched.append(touched)
    return BenchReport(index_type, alpha, beta, build_s, index.entry_count(),
                       len(index_to_bytes(index)), queries, algos)


def cmd_bench(args) -> int:
    if args.queries < 1:
        raise UsageError("--queries must be positive")
    graph = _read_graph(args.input)
    report = run_bench(graph, args.alpha, args.beta, args.queries, args.seed, args.type,
                       args.epsilon)
    _write_text(args.output, report.to_csv())
    return EXIT_OK


def cmd_gen_weights(args) -> int:
    try:
        dist = parse_distribution(args.dist)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    graph = _read_graph(args.input)
    _write_text(args.output, generate_weights(graph, dist, args.seed).to_text())
    return EXIT_OK


def _parse_update(line: str, lineno: int):
    parts = line.split()
    if parts[0] == "+" and len(parts) in (3, 4):
        try:
            weight = float(parts[3]) if len(parts) == 4 else 1.0
        except ValueError:
            raise GraphFormatError(f"bad weight {parts[3]!r}", lineno) from None
        return "+", parts[1], parts[2], weight
    if parts[0] == "-" and len(parts) == 3:
        return "-", parts[1], parts[2], None
    raise GraphFormatError(f"expected '+ u v [w]' or '- u v', got {line.strip()!r}", lineno)


def cmd_update(args) -> int:
    index = load_index(args.index)
    graph = _read_graph(args.input)
    index.check_graph(graph)
    stream = sys.stdin if args.updates == "-" else open(args.updates, encoding="utf-8")
    applied = 0
    with stream:
        for lineno, line in enumerate(stream, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            op, u, v, w = _parse_update(line, lineno)
            if u.startswith("v") and v.startswith("u"):
                u, v = v, u
            try:
                if op == "+":
                    index, graph, _ = insert_edge(index, graph, u, v, w)
                else:
                    index, graph, _ = delete_edge(index, graph, u, v)
            except (KeyError, ValueError) as exc:
                raise DataError(f"line {lineno}: {exc}") from exc
            applied += 1
    save_index(index, args.output or args.index)
    if args.graph_output:
        _write_text(args.graph_output, graph.to_text())
    _say(f"applied {applied} updates; delta={index.bound} entries={index.entry_count()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bicomm", description="Community search on weighted bipartite graphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="build an index from an edge list")
    p.add_argument("--input", required=True)
    p.add_argument("--type", choices=VARIANTS, default="degeneracy")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="community or significant-community query")
    p.add_argument("--index")
    p.add_argument("--input", help="edge list; required for online and baseline")
    p.add_argument("--q", required=True, help="vertex token such as u1 or v3")
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--algo", choices=ALGOS, default="expand")
    p.add_argument("--epsilon", type=float, default=2.0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("stats", help="dataset summary as JSON")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="time every algorithm on sampled queries (CSV)")
    p.add_argument("--input", required=True)
    p.add_argument("--type", choices=VARIANTS, default="degeneracy")
    p.add_argument("--alpha", default="delta", help="integer or c*delta")
    p.add_argument("--beta", default="delta", help="integer or c*delta")
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=2.0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-weights", help="replace edge weights with random draws")
    p.add_argument("--input", required=True)
    p.add_argument("--dist", required=True,
                   help="constant:C | uniform:LO,HI | skewnormal:LOC,SCALE,SHAPE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_gen_weights)

    p = sub.add_parser("update", help="apply '+ u v w' / '- u v' lines to a degeneracy index")
    p.add_argument("--index", required=True)
    p.add_argument("--input", required=True, help="edge list the index was built from")
    p.add_argument("--updates", required=True, help="update file, or - for stdin")
    p.add_argument("--output", help="where to write the index (default: overwrite --index)")
    p.add_argument("--graph-output", help="write the updated edge list here")
    p.set_defaults(func=cmd_update)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "epsilon", 2.0) <= 1:
        parser.error("--epsilon must be > 1")
    try:
        return args.func(args)
    except UsageError as exc:
        _say(f"bicomm: error: {exc}")
        return EXIT_USAGE
    except UnknownVertexError as exc:
        _say(f"bicomm: unknown vertex {exc.args[0]!r}")
        return EXIT_DATA
    except (DataError, GraphFormatError, IndexFormatError, StaleIndexError, OSError) as exc:
        _say(f"bicomm: {exc}")
        return EXIT_DATA
    except AssertionError as exc:
        _say(f"bicomm: internal error: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
