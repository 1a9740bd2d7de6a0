"""Average information contribution of edges over a permutation source.

For every permutation ``p`` the graph is relabeled, its BDM taken, and each
edge's contribution ``bdm(X) - bdm(X without edge)`` is credited back to the
edge's original labels. Totals are divided by the number of permutations
consumed and the edges sorted from highest to lowest.

Positive contribution: removing the edge loses information (the graph gets
simpler). Negative: removal moves the graph toward randomness.
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numba
import numpy as np

from . import _kernels
from .bdm import bdm2d
from .ctm_table import CtmTable
from .errors import DataError
from .graph_core import Edge, EdgeNotFoundError, Graph, adjacency_matrix, normalize_edge
from .permutations import (
    SAMPLE_CHUNK,
    PermSource,
    TooLargeError,
    MAX_ENUMERATION_N,
    automorphism_group,
    sample_chunks,
    stabilizer_chain,
)

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "bdmgraph-checkpoint"
CHECKPOINT_VERSION = 1
CHECKPOINT_EVERY = 1 << 20
SUFFIX_LEN = 8


class EmptyGraphError(DataError):
    pass


class CheckpointMismatchError(DataError):
    pass


@dataclass(frozen=True)
class EdgeInfo:
    edge: Edge
    avg_info: float


@dataclass(frozen=True)
class EdgeInfoReport:
    entries: tuple[EdgeInfo, ...]
    perm_count: int
    meta: Mapping[str, object] = field(default_factory=dict)
    elapsed: float = field(default=0.0, compare=False)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def edges(self) -> list[Edge]:
        return [x.edge for x in self.entries]

    def values(self) -> dict[Edge, float]:
        return {x.edge: x.avg_info for x in self.entries}

    def rank_of(self, edge: Sequence[int]) -> int:
        """0-based position of ``edge`` in the sorted order."""
        return self.edges.index(normalize_edge(*edge))


@dataclass(frozen=True)
class RunStats:
    max_info: Edge
    top_gap: float
    runtime: float
    perms_per_sec: float


def sort_entries(values: Mapping[Edge, float]) -> tuple[EdgeInfo, ...]:
    """Descending by value; equal values ordered by endpoints ascending."""
    ordered = sorted(values.items(), key=lambda kv: (-kv[1], kv[0]))
    return tuple(EdgeInfo(e, v) for e, v in ordered)


def edge_info_single(g: Graph, perm: Sequence[int], edge_permuted: Sequence[int], table: CtmTable,
                     base_bdm: float | None = None) -> float:
    """Contribution of one edge, given in permuted labels, under ``perm``."""
    x = adjacency_matrix(g, perm)
    w, v = edge_permuted
    if not x[w, v]:
        raise EdgeNotFoundError(f"edge ({w}, {v}) not in the permuted graph")
    if base_bdm is None:
        base_bdm = bdm2d(x, table)
    y = x.copy()
    y[w, v] = y[v, w] = 0
    return base_bdm - bdm2d(y, table)


def average_info_reference(g: Graph, source: PermSource, table: CtmTable) -> dict[Edge, float]:
    """Direct transcription of the averaging loop in pure Python. Slow;
    used to cross-check the compiled sweep on small graphs."""
    totals = {e: [] for e in g.sorted_edges}
    count = 0
    for perm in source.iterate(g):
        inv = [0] * g.n
        for u, x in enumerate(perm):
            inv[x] = u
        x = adjacency_matrix(g, perm)
        base = bdm2d(x, table)
        for u, v in g.sorted_edges:
            w, y = perm[u], perm[v]
            contrib = edge_info_single(g, perm, (w, y), table, base)
            totals[normalize_edge(inv[w], inv[y])].append(contrib)
        count += 1
    return {e: math.fsum(v) / count for e, v in totals.items()}


class _Plan:
    """Fixed split of a permutation source into chunks."""

    def __init__(self, g: Graph, source: PermSource):
        self.g = g
        self.source = source
        n = g.n
        if source.kind == "random_sample":
            self.depth = None
            self.chunk_size = SAMPLE_CHUNK
            self.n_chunks = -(-source.sample_size // SAMPLE_CHUNK)
            self.expected = source.sample_size
            self.ci = self.cj = None
            return
        if n > MAX_ENUMERATION_N:
            raise TooLargeError(f"n={n} exceeds the enumeration guard n <= {MAX_ENUMERATION_N}")
        self.depth = max(0, n - SUFFIX_LEN)
        self.chunk_size = math.factorial(n - self.depth)
        self.n_chunks = math.factorial(n) // self.chunk_size
        if source.kind == "automorphic_subsets":
            chain = stabilizer_chain(g)
            pairs = chain.constraints
            self.expected = math.factorial(n) // chain.order
            self.aut_order = chain.order
        else:
            pairs = ()
            self.expected = math.factorial(n)
        self.ci = np.array([i for i, _ in pairs], dtype=np.int64)
        self.cj = np.array([j for _, j in pairs], dtype=np.int64)

    def header(self, g: Graph, table: CtmTable) -> dict:
        return {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "graph_sha256": g.digest,
            "source": self.source.describe(),
            "block_size": table.side,
            "table_source": table.source_id,
            "chunk_size": self.chunk_size,
            "n_chunks": self.n_chunks,
        }


def _load_checkpoint(path: Path, header: dict):
    with open(path, encoding="utf-8") as fh:
        state = json.load(fh)
    if state.get("header") != header:
        raise CheckpointMismatchError(f"{path} was written for a different run")
    sums = [[float.fromhex(x) for x in row] for row in state["sums"]]
    return sums, list(state["counts"])


def _save_checkpoint(path: Path, header: dict, sums, counts) -> None:
    state = {
        "header": header,
        "chunks_done": len(counts),
        "counts": [int(c) for c in counts],
        "sums": [[float(x).hex() for x in row] for row in sums],
    }
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(state, fh)
    os.replace(tmp, path)


class _threads:
    def __init__(self, workers: int | None):
        self.workers = workers

    def __enter__(self):
        self.prev = numba.get_num_threads()
        limit = numba.config.NUMBA_NUM_THREADS
        want = limit if self.workers is None else max(1, min(self.workers, limit))
        if self.workers is not None and self.workers > limit:
            log.warning("requested %d workers, numba allows %d", self.workers, limit)
        numba.set_num_threads(want)
        return want

    def __exit__(self, *exc):
        numba.set_num_threads(self.prev)


def average_info(
    g: Graph,
    source: PermSource,
    table: CtmTable,
    *,
    workers: int | None = None,
    checkpoint=None,
    graph_id: str = "",
    progress: Callable[[int, int], None] | None = None,
) -> EdgeInfoReport:
    """Average contribution of each edge of ``g`` over ``source``.

    ``workers`` caps the compiled thread pool (default: all numba threads).
    Results do not depend on it. With ``checkpoint`` set, partial sums are
    written every ~2**20 permutations and a rerun resumes from the file.
    """
    if not g.edges:
        raise EmptyGraphError("graph has no edges")
    started = time.perf_counter()
    plan = _Plan(g, source)
    edges = g.sorted_edges
    ne = len(edges)
    eu = np.array([u for u, _ in edges], dtype=np.int64)
    ev = np.array([v for _, v in edges], dtype=np.int64)
    l = table.side
    blk, mask, cnt = _kernels.build_occurrences(g.n, l)
    nblocks = (((g.n + l - 1) // l)) ** 2
    log2tab = np.log2(np.maximum(np.arange(nblocks + 1, dtype=np.float64), 1.0))
    ctm = np.ascontiguousarray(table.values)

    header = plan.header(g, table)
    ckpt = Path(checkpoint) if checkpoint else None
    sums: list[list[float]] = []
    counts: list[int] = []
    if ckpt is not None and ckpt.exists():
        sums, counts = _load_checkpoint(ckpt, header)
        log.info("resuming from %s at chunk %d/%d", ckpt, len(counts), plan.n_chunks)

    batch = max(1, CHECKPOINT_EVERY // plan.chunk_size)
    with _threads(workers):
        while len(counts) < plan.n_chunks:
            lo = len(counts)
            hi = min(plan.n_chunks, lo + batch)
            part_sums = np.zeros((hi - lo, ne))
            part_counts = np.zeros(hi - lo, dtype=np.int64)
            if plan.depth is None:
                blocks = [rows for _, rows in sample_chunks(g.n, source.sample_size, source.seed, lo, hi)]
                bounds = np.cumsum([0] + [len(b) for b in blocks]).astype(np.int64)
                perms = np.ascontiguousarray(np.concatenate(blocks))
                _kernels.sweep_rows(perms, bounds, nblocks, eu, ev, blk, mask, cnt, ctm, log2tab,
                                    part_sums, part_counts)
            else:
                ids = np.arange(lo, hi, dtype=np.int64)
                _kernels.sweep_prefix_chunks(ids, g.n, plan.depth, nblocks, eu, ev, blk, mask, cnt,
                                             ctm, log2tab, plan.ci, plan.cj, part_sums, part_counts)
            sums.extend(part_sums.tolist())
            counts.extend(int(c) for c in part_counts)
            if ckpt is not None:
                _save_checkpoint(ckpt, header, sums, counts)
            if progress is not None:
                progress(len(counts), plan.n_chunks)

    consumed = sum(counts)
    if consumed != plan.expected:
        raise RuntimeError(f"consumed {consumed} permutations, expected {plan.expected}")
    columns = list(zip(*sums))
    values = {e: math.fsum(columns[k]) / consumed for k, e in enumerate(edges)}
    meta = {
        "graph_id": graph_id or g.digest[:16],
        "block_size": l,
        "table_source": table.source_id,
        "perm_source": source.describe(),
    }
    if source.kind == "automorphic_subsets":
        meta["automorphism_group_order"] = plan.aut_order
    return EdgeInfoReport(sort_entries(values), consumed, meta, time.perf_counter() - started)


def count_representatives(g: Graph, workers: int | None = None) -> int:
    """Count automorphic-subset representatives by enumerating them with the
    same compiled walk the sweep uses."""
    plan = _Plan(g, PermSource.automorphic_subsets())
    counts = np.zeros(plan.n_chunks, dtype=np.int64)
    with _threads(workers):
        _kernels.count_prefix_chunks(np.arange(plan.n_chunks, dtype=np.int64), g.n, plan.depth,
                                     plan.ci, plan.cj, counts)
    return int(counts.sum())


def fold_over_automorphisms(report: EdgeInfoReport, g: Graph) -> EdgeInfoReport:
    """Average each edge's value over its orbit under ``Aut(g)``.

    Applied to a report computed from automorphic-subset representatives,
    this gives exactly the full symmetric-group average (whatever member of
    each subset was used), at a fraction of the cost.
    """
    group = automorphism_group(g)
    values = report.values()
    folded = {}
    for e in values:
        orbit = {normalize_edge(a[e[0]], a[e[1]]) for a in group}
        folded[e] = math.fsum(values[o] for o in sorted(orbit)) / len(orbit)
    meta = dict(report.meta, folded_over_automorphisms=True)
    return EdgeInfoReport(sort_entries(folded), report.perm_count * len(group), meta, report.elapsed)


def run_stats(report: EdgeInfoReport) -> RunStats:
    if not report.entries:
        raise ValueError("empty report")
    top = report.entries[0]
    gap = top.avg_info - report.entries[1].avg_info if len(report.entries) > 1 else 0.0
    rate = report.perm_count / report.elapsed if report.elapsed > 0 else float("inf")
    return RunStats(top.edge, gap, report.elapsed, rate)
