"""Post-processing of edge reports: connecting-edge identification, edge
grouping, the one-bit distance test, and recursive deconvolution."""

from __future__ import annotations

from dataclasses import dataclass, field

from .ctm_table import CtmTable
from .graph_core import CompositeGraph, Edge, Graph, connected_components, remove_edge
from .perturbation import EdgeInfoReport, average_info
from .permutations import PermSource

LOG2_2 = 1.0
PARTIAL_SHARE = 0.6
GROUPINGS = ("complete", "partial", "scattered")


@dataclass(frozen=True)
class GroupingScheme:
    label: str
    runs: tuple[tuple[int, int], ...]  # (part, length) in sorted order
    max_run: int = 0

    @property
    def refined(self) -> bool:
        """At least two edges of one part sit next to each other."""
        return self.max_run >= 2


@dataclass(frozen=True)
class AnalysisResult:
    connecting_is_max: bool
    grouping: GroupingScheme
    distance: float | None
    passes_log2: bool
    rank_of_connecting: int  # 1-based


def _check_covers(report: EdgeInfoReport, composite: CompositeGraph) -> None:
    if set(report.edges) != set(composite.graph.edges):
        raise ValueError("report does not cover the composite's edges")


def identify_max_info(report: EdgeInfoReport, composite: CompositeGraph) -> bool:
    _check_covers(report, composite)
    return report.entries[0].edge == composite.connecting_edge


def classify_grouping(report: EdgeInfoReport, composite: CompositeGraph,
                      drop_connecting: bool = False) -> GroupingScheme:
    """Maximal runs of same-part edges in the sorted order.

    The connecting edge stays in the sequence and ends any run it falls
    inside; with ``drop_connecting`` it is deleted first, so the edges on
    either side of it may join. ``runs`` lists part runs only.

    complete: exactly two runs. partial: otherwise, if some run holds at
    least 60% of its part's edges. scattered: anything else.
    """
    _check_covers(report, composite)
    parts = [composite.part_of_edge(e) for e in report.edges]
    if drop_connecting:
        parts = [p for p in parts if p != 0]
    runs: list[list[int]] = []
    for p in parts:
        if runs and runs[-1][0] == p:
            runs[-1][1] += 1
        else:
            runs.append([p, 1])
    runs = [r for r in runs if r[0] != 0]
    sizes = {1: parts.count(1), 2: parts.count(2)}
    max_run = max((n for _, n in runs), default=0)
    if len(runs) == 2:
        label = "complete"
    elif any(n >= PARTIAL_SHARE * sizes[p] for p, n in runs):
        label = "partial"
    else:
        label = "scattered"
    return GroupingScheme(label, tuple((p, n) for p, n in runs), max_run)


def distance_test(report: EdgeInfoReport, composite: CompositeGraph) -> AnalysisResult:
    """Gap between the connecting edge and the next edge below it.

    ``distance`` is None when the connecting edge is last in the order.
    """
    if len(report) < 2:
        raise ValueError("need at least two edges")
    is_max = identify_max_info(report, composite)
    pos = report.rank_of(composite.connecting_edge)
    distance = None
    if pos + 1 < len(report):
        distance = report.entries[pos].avg_info - report.entries[pos + 1].avg_info
    passes = is_max and distance is not None and distance > LOG2_2
    return AnalysisResult(is_max, classify_grouping(report, composite), distance, passes, pos + 1)


@dataclass(frozen=True)
class Round:
    report: EdgeInfoReport
    top_edge: Edge
    gap: float
    removed: bool


@dataclass(frozen=True)
class Deconvolution:
    removed: tuple[Edge, ...]
    rounds: tuple[Round, ...]
    graph: Graph
    components: tuple[tuple[int, ...], ...] = field(default=())


def deconvolve(g: Graph, source: PermSource, table: CtmTable, max_rounds: int, *,
               workers: int | None = None) -> Deconvolution:
    """Repeatedly remove the top edge while it leads the next edge by more
    than one bit. Stops after ``max_rounds`` removals, when the top edge
    does not qualify, or when fewer than two edges remain."""
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    removed: list[Edge] = []
    rounds: list[Round] = []
    current = g
    while len(removed) < max_rounds and len(current.edges) >= 2:
        report = average_info(current, source, table, workers=workers)
        top, second = report.entries[0], report.entries[1]
        gap = top.avg_info - second.avg_info
        ok = gap > LOG2_2
        rounds.append(Round(report, top.edge, gap, ok))
        if not ok:
            break
        removed.append(top.edge)
        current = remove_edge(current, top.edge)
    comps = tuple(tuple(c) for c in connected_components(current))
    return Deconvolution(tuple(removed), tuple(rounds), current, comps)
