"""Command line entry point.

Exit codes: 0 success, 1 usage, 2 bad input data, 3 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

import numba

from . import __version__
from .analysis import deconvolve, distance_test
from .ctm_table import convert_pybdm_dataset, default_table, load_ctm_table, save_ctm_table
from .errors import DataError, ResourceLimitError
from .graph_core import CompositeGraph, Graph, read_graph, write_graph
from .permutations import PermSource
from .perturbation import EdgeInfoReport, average_info
from .suite import SUITE, find_row

SCHEMA = 1
PERM_CHOICES = {"sym": "symmetric_group", "aut": "automorphic_subsets", "sample": "random_sample"}
CSV_COLUMNS = ["edge_u", "edge_v", "part", "avg_info", "rank"]

log = logging.getLogger("bdmgraph")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_run_options(p: argparse.ArgumentParser, deconv: bool = False) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", type=Path, help="edge-list graph file")
    src.add_argument("--suite-row", help="suite row name or slug, e.g. complete5-cycle4")
    p.add_argument("--perm", choices=sorted(PERM_CHOICES), default="aut", help="permutation source (default aut)")
    p.add_argument("--sample-size", type=int, help="permutations to draw with --perm sample")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p.add_argument("--block-size", type=int, choices=(3, 4), default=3)
    p.add_argument("--ctm", type=Path, help="CTM table CSV (default: packaged table)")
    p.add_argument("--workers", type=int, help="compute threads (default: all)")
    p.add_argument("--out", type=Path, help="JSON report path (default: stdout)")
    if deconv:
        p.add_argument("--max-rounds", type=int, default=None, help="removal limit (default: edge count)")
    else:
        p.add_argument("--checkpoint", type=Path, help="resumable progress file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bdmgraph", description="Edge perturbation analysis of composite graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("suite", help="write the 30 composite graphs")
    p.add_argument("--out", type=Path, required=True, help="output directory")

    _add_run_options(sub.add_parser("analyze", help="average edge contributions of one graph"))
    _add_run_options(sub.add_parser("deconvolve", help="remove qualifying edges round by round"), deconv=True)

    p = sub.add_parser("convert-ctm", help="expand a PyBDM 2D dataset into a CTM CSV")
    p.add_argument("dataset", type=Path, help="ctm-b2-d4x4.pkl.gz")
    p.add_argument("--side", type=int, choices=(3, 4), required=True)
    p.add_argument("--out", type=Path, required=True)
    return parser


def _load_input(args) -> tuple[str, Graph, CompositeGraph | None]:
    if args.suite_row:
        comp = find_row(args.suite_row).build()
        return find_row(args.suite_row).slug, comp.graph, comp
    g = read_graph(args.graph)
    if isinstance(g, CompositeGraph):
        return args.graph.stem, g.graph, g
    return args.graph.stem, g, None


def _source(args) -> PermSource:
    kind = PERM_CHOICES[args.perm]
    if kind == "random_sample":
        if args.sample_size is None:
            raise DataError("--perm sample needs --sample-size")
        return PermSource.random_sample(args.sample_size, args.seed)
    if args.sample_size is not None:
        raise DataError("--sample-size only applies to --perm sample")
    return PermSource(kind)


def _table(args):
    if args.ctm is not None:
        return load_ctm_table(args.ctm, args.block_size)
    return default_table(args.block_size)


def _entries(report: EdgeInfoReport, comp: CompositeGraph | None) -> list[dict]:
    return [
        {
            "edge": list(x.edge),
            "part": comp.part_of_edge(x.edge) if comp is not None else None,
            "avg_info": x.avg_info,
            "rank": i + 1,
        }
        for i, x in enumerate(report.entries)
    ]


def _config(args, name: str, g: Graph, table, source: PermSource) -> dict:
    return {
        "graph": name,
        "graph_sha256": g.digest,
        "perm_source": source.describe(),
        "block_size": table.side,
        "ctm_source": table.source_id,
        "code_version": __version__,
    }


def _graph_info(g: Graph, comp: CompositeGraph | None) -> dict:
    out = {"n": g.n, "edges": len(g.edges)}
    if comp is not None:
        out["connecting_edge"] = list(comp.connecting_edge)
        out["part2_offset"] = comp.n1
    return out


def entries_csv(entries: list[dict], extra: dict | None = None) -> str:
    buf = io.StringIO()
    cols = list(extra or {}) + CSV_COLUMNS
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for e in entries:
        row = list((extra or {}).values()) + [e["edge"][0], e["edge"][1],
                                             "" if e["part"] is None else e["part"], repr(e["avg_info"]), e["rank"]]
        w.writerow(row)
    return buf.getvalue()


def _emit(args, doc: dict, csv_text: str, run: dict) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
        return
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(text, encoding="utf-8")
    args.out.with_suffix(".csv").write_text(csv_text, encoding="utf-8")
    args.out.with_suffix(".run.json").write_text(json.dumps(run, indent=2) + "\n", encoding="utf-8")
    log.info("wrote %s", args.out)


def _run_info(elapsed: float, perms: int, workers) -> dict:
    return {
        "elapsed_sec": elapsed,
        "perms_per_sec": perms / elapsed if elapsed > 0 else None,
        "workers_requested": workers,
        "threads_available": numba.config.NUMBA_NUM_THREADS,
    }


def _progress(done: int, total: int) -> None:
    log.info("chunks %d/%d", done, total)


def cmd_suite(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    for row in SUITE:
        write_graph(args.out / f"{row.slug}.txt", row.build())
    log.info("wrote %d graphs to %s", len(SUITE), args.out)
    return 0


def cmd_analyze(args) -> int:
    name, g, comp = _load_input(args)
    table, source = _table(args), _source(args)
    t0 = time.perf_counter()
    report = average_info(g, source, table, workers=args.workers, checkpoint=args.checkpoint,
                          graph_id=name, progress=_progress)
    elapsed = time.perf_counter() - t0
    entries = _entries(report, comp)
    doc = {
        "schema": SCHEMA,
        "command": "analyze",
        "config": _config(args, name, g, table, source),
        "graph": _graph_info(g, comp),
        "perm_count": report.perm_count,
        "entries": entries,
        "analysis": None,
    }
    if source.kind == "automorphic_subsets":
        doc["automorphic_subsets"] = report.perm_count
        doc["automorphism_group_order"] = report.meta["automorphism_group_order"]
    if comp is not None and len(report) >= 2:
        res = distance_test(report, comp)
        doc["analysis"] = {
            "connecting_is_max": res.connecting_is_max,
            "rank_of_connecting": res.rank_of_connecting,
            "distance": res.distance,
            "passes_log2": res.passes_log2,
            "grouping": res.grouping.label,
            "grouping_runs": [list(r) for r in res.grouping.runs],
            "max_run": res.grouping.max_run,
            "refined": res.grouping.refined,
        }
    _emit(args, doc, entries_csv(entries), _run_info(elapsed, report.perm_count, args.workers))
    return 0


def cmd_deconvolve(args) -> int:
    name, g, comp = _load_input(args)
    table, source = _table(args), _source(args)
    max_rounds = len(g.edges) if args.max_rounds is None else args.max_rounds
    t0 = time.perf_counter()
    result = deconvolve(g, source, table, max_rounds, workers=args.workers)
    elapsed = time.perf_counter() - t0
    rounds = []
    csv_parts = []
    for i, r in enumerate(result.rounds, 1):
        entries = _entries(r.report, comp)
        rounds.append({
            "round": i,
            "perm_count": r.report.perm_count,
            "top_edge": list(r.top_edge),
            "gap": r.gap,
            "removed": r.removed,
            "entries": entries,
        })
        text = entries_csv(entries, {"round": i})
        csv_parts.append(text if i == 1 else text.split("\n", 1)[1])
    doc = {
        "schema": SCHEMA,
        "command": "deconvolve",
        "config": dict(_config(args, name, g, table, source), max_rounds=max_rounds),
        "graph": _graph_info(g, comp),
        "rounds": rounds,
        "removed_edges": [list(e) for e in result.removed],
        "components": [list(c) for c in result.components],
    }
    if comp is not None:
        doc["first_removed_is_connecting"] = bool(result.removed) and result.removed[0] == comp.connecting_edge
    perms = sum(r.report.perm_count for r in result.rounds)
    csv_text = "".join(csv_parts) or "round," + ",".join(CSV_COLUMNS) + "\n"
    _emit(args, doc, csv_text, _run_info(elapsed, perms, args.workers))
    return 0


def cmd_convert(args) -> int:
    table = convert_pybdm_dataset(args.dataset, args.side)
    save_ctm_table(table, args.out)
    log.info("wrote %d entries to %s", len(table), args.out)
    return 0


COMMANDS = {"suite": cmd_suite, "analyze": cmd_analyze, "deconvolve": cmd_deconvolve, "convert-ctm": cmd_convert}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"bdmgraph: {exc}", file=sys.stderr)
        return 3
    except (DataError, OSError) as exc:
        print(f"bdmgraph: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
