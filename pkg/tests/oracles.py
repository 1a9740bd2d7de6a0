"""Slow, independent reference implementations used by the tests.

Nothing here imports the package's numeric code paths: padding, tiling,
automorphisms and averaging are redone with plain loops.
"""

from __future__ import annotations

import itertools
import math


def naive_bdm(matrix, values, l):
    """Tile tally over the wrap-padded matrix with plain loops.

    ``values`` maps a block bit string (row-major, e.g. "010...") to its
    CTM value.
    """
    n = len(matrix)
    size = -(-n // l) * l
    tally = {}
    for bi in range(0, size, l):
        for bj in range(0, size, l):
            bits = "".join(
                str(int(matrix[(bi + r) % n][(bj + c) % n])) for r in range(l) for c in range(l)
            )
            tally[bits] = tally.get(bits, 0) + 1
    return math.fsum(values[b] + math.log2(k) for b, k in tally.items())


def brute_automorphisms(n, edges):
    es = {tuple(sorted(e)) for e in edges}
    out = []
    for p in itertools.permutations(range(n)):
        if {tuple(sorted((p[u], p[v]))) for u, v in es} == es:
            out.append(p)
    return out


def adjacency(n, edges, perm=None):
    m = [[0] * n for _ in range(n)]
    for u, v in edges:
        if perm is not None:
            u, v = perm[u], perm[v]
        m[u][v] = m[v][u] = 1
    return m


def naive_average(n, edges, perms, values, l):
    """Average of bdm(X) - bdm(X without e) per original edge, loops only."""
    edges = [tuple(sorted(e)) for e in edges]
    totals = {e: [] for e in edges}
    count = 0
    for p in perms:
        x = adjacency(n, edges, p)
        base = naive_bdm(x, values, l)
        for e in edges:
            y = [row[:] for row in x]
            w, z = p[e[0]], p[e[1]]
            y[w][z] = y[z][w] = 0
            totals[e].append(base - naive_bdm(y, values, l))
        count += 1
    return {e: math.fsum(v) / count for e, v in totals.items()}
