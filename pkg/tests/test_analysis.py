from __future__ import annotations

import pytest

from bdmgraph.analysis import classify_grouping, deconvolve, distance_test, identify_max_info
from bdmgraph.graph_core import Graph, connect, connected_components, generate, GeneratorSpec
from bdmgraph.permutations import PermSource
from bdmgraph.perturbation import EdgeInfo, EdgeInfoReport, average_info
from bdmgraph.suite import find_row

SYM = PermSource.symmetric_group()
AUT = PermSource.automorphic_subsets()


def two_paths(k1=6, k2=6):
    """Path parts of ``k1`` and ``k2`` vertices joined end to start: every
    part has ``k - 1`` edges, handy for building orderings by hand."""
    g1 = Graph.from_edges(k1, [(i, i + 1) for i in range(k1 - 1)])
    g2 = Graph.from_edges(k2, [(i, i + 1) for i in range(k2 - 1)])
    return connect(g1, g2, k1 - 1, 0)


def report_for(comp, order):
    """Report listing ``order`` (edges) with strictly decreasing values."""
    entries = tuple(EdgeInfo(e, float(len(order) - i)) for i, e in enumerate(order))
    return EdgeInfoReport(entries, 1)


def edges_of(comp, part):
    return [e for e in comp.graph.sorted_edges if comp.part_of_edge(e) == part]


def test_identify_max_info():
    c = two_paths()
    link = c.connecting_edge
    order = [link] + edges_of(c, 1) + edges_of(c, 2)
    assert identify_max_info(report_for(c, order), c)
    assert not identify_max_info(report_for(c, order[1:] + [link]), c)


def test_complete_grouping():
    c = two_paths()
    r = report_for(c, [c.connecting_edge] + edges_of(c, 2) + edges_of(c, 1))
    g = classify_grouping(r, c)
    assert g.label == "complete" and g.runs == ((2, 5), (1, 5))
    assert g.refined


def test_scattered_grouping():
    c = two_paths()
    p1, p2 = edges_of(c, 1), edges_of(c, 2)
    # parts alternate 1,1,2,1,2,2,1,2,1,2 -> longest run 2 of 5 edges (40%)
    order = [c.connecting_edge, p1[0], p1[1], p2[0], p1[2], p2[1], p2[2], p1[3], p2[3], p1[4], p2[4]]
    g = classify_grouping(report_for(c, order), c)
    assert g.label == "scattered" and g.max_run == 2


def test_partial_threshold_inclusive():
    c = two_paths()
    p1, p2 = edges_of(c, 1), edges_of(c, 2)
    order = [c.connecting_edge] + p1[:3] + p2[:2] + p1[3:4] + p2[2:4] + p1[4:] + p2[4:]
    g = classify_grouping(report_for(c, order), c)
    assert g.label == "partial"  # run of 3 out of 5 = 60%
    assert max(n for _, n in g.runs) == 3


def test_connecting_edge_splits_a_run():
    c = two_paths()
    p1, p2 = edges_of(c, 1), edges_of(c, 2)
    order = p1[:2] + [c.connecting_edge] + p1[2:] + p2
    kept = classify_grouping(report_for(c, order), c)
    dropped = classify_grouping(report_for(c, order), c, drop_connecting=True)
    assert kept.label == "partial" and kept.runs == ((1, 2), (1, 3), (2, 5))
    assert dropped.label == "complete" and dropped.runs == ((1, 5), (2, 5))


def test_grouping_depends_only_on_order():
    c = two_paths()
    order = [c.connecting_edge] + edges_of(c, 1)[::-1] + edges_of(c, 2)
    a = report_for(c, order)
    b = EdgeInfoReport(tuple(EdgeInfo(x.edge, 1000.0 - 7 * i) for i, x in enumerate(a.entries)), 1)
    assert classify_grouping(a, c) == classify_grouping(b, c)


def test_complete_implies_sixty_percent():
    c = two_paths(4, 7)
    for order in ([c.connecting_edge] + edges_of(c, 1) + edges_of(c, 2),
                  edges_of(c, 2) + [c.connecting_edge] + edges_of(c, 1)):
        g = classify_grouping(report_for(c, order), c)
        assert g.label == "complete"
        sizes = {1: 3, 2: 6}
        assert all(n >= 0.6 * sizes[p] for p, n in g.runs)


def test_distance_strict_boundary():
    c = two_paths(3, 3)
    p1, p2 = edges_of(c, 1), edges_of(c, 2)
    values = [3.0, 2.0, 1.5, 1.0, 0.5]
    order = [c.connecting_edge] + p1 + p2
    r = EdgeInfoReport(tuple(EdgeInfo(e, v) for e, v in zip(order, values)), 1)
    res = distance_test(r, c)
    assert res.distance == 1.0 and res.connecting_is_max and not res.passes_log2
    r2 = EdgeInfoReport(tuple(EdgeInfo(e, v) for e, v in zip(order, [3.5] + values[1:])), 1)
    assert distance_test(r2, c).passes_log2


def test_distance_not_max_and_last():
    c = two_paths(3, 3)
    p1, p2 = edges_of(c, 1), edges_of(c, 2)
    mid = report_for(c, p1 + [c.connecting_edge] + p2)
    res = distance_test(mid, c)
    assert res.rank_of_connecting == 3 and res.distance == 1.0 and not res.passes_log2
    last = distance_test(report_for(c, p1 + p2 + [c.connecting_edge]), c)
    assert last.distance is None and not last.passes_log2


def test_report_must_cover_composite():
    c = two_paths(3, 3)
    with pytest.raises(ValueError):
        identify_max_info(EdgeInfoReport((EdgeInfo((0, 1), 1.0),), 1), c)


def test_k5c4_representatives_complete(table3):
    c = find_row("complete5-cycle4").build()
    res = distance_test(average_info(c.graph, AUT, table3), c)
    assert res.connecting_is_max and res.grouping.label == "complete"
    assert res.distance == pytest.approx(5.317601412837774, abs=1e-6)


def test_k6k6_symmetric_group_distance(table3):
    """Full symmetric-group average via the orbit fold of the representatives."""
    from bdmgraph.perturbation import fold_over_automorphisms

    c = find_row("complete6-complete6").build()
    report = fold_over_automorphisms(average_info(c.graph, AUT, table3), c.graph)
    res = distance_test(report, c)
    assert res.passes_log2
    assert res.distance == pytest.approx(24.880830306329372, abs=1e-6)


def test_deconvolve_k5k5(table3):
    c = find_row("complete5-complete5").build()
    out = deconvolve(c.graph, SYM, table3, max_rounds=5)
    assert out.removed == (c.connecting_edge,)
    assert len(out.rounds) == 2 and not out.rounds[1].removed
    assert out.components == (tuple(range(5)), tuple(range(5, 10)))


def test_deconvolve_zero_rounds(table3):
    g = find_row("complete4-cycle5").build().graph
    out = deconvolve(g, AUT, table3, max_rounds=0)
    assert out.removed == () and out.rounds == () and out.graph == g


def test_deconvolve_single_part_terminates(table3):
    k4 = generate(GeneratorSpec("complete", 4))
    out = deconvolve(k4, SYM, table3, max_rounds=10)
    assert len(out.removed) <= len(k4.edges)
    assert sorted(v for comp in out.components for v in comp) == list(range(4))
    assert [list(c) for c in out.components] == connected_components(out.graph)


def test_deconvolve_disconnected_input(table3):
    g = Graph.from_edges(8, [(0, 1), (1, 2), (0, 2), (4, 5), (5, 6), (6, 7), (4, 7)])
    out = deconvolve(g, AUT, table3, max_rounds=20)
    assert len(out.rounds) <= len(g.edges)
    assert all(e in g.edges for e in out.removed)
    assert {3} <= {v for comp in out.components if len(comp) == 1 for v in comp}
