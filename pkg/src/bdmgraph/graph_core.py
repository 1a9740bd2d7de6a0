"""Undirected simple graphs, subgraph families and two-part composites.

Vertices are ``0..n-1``. Edges are stored normalised as ``(min, max)``.

Random families draw from ``numpy.random.Generator(PCG64(seed))``; the
sampling order for each family is documented on its builder so a given
``GeneratorSpec`` always yields the same graph.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import DataError

Edge = tuple[int, int]

DEFAULT_SEED = 42
FAMILIES = (
    "complete",
    "cycle",
    "star",
    "ladder",
    "erdos_renyi",
    "barabasi_albert",
    "watts_strogatz",
)
RANDOM_FAMILIES = ("erdos_renyi", "barabasi_albert", "watts_strogatz")


class InvalidSpecError(DataError):
    pass


class EdgeNotFoundError(DataError, KeyError):
    pass


class GraphFormatError(DataError):
    pass


def normalize_edge(u: int, v: int) -> Edge:
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[Edge]

    def __post_init__(self):
        if self.n < 0:
            raise DataError(f"vertex count must be >= 0, got {self.n}")
        norm = frozenset(normalize_edge(u, v) for u, v in self.edges)
        for u, v in norm:
            if u == v:
                raise DataError(f"self-loop at vertex {u}")
            if u < 0 or v >= self.n:
                raise DataError(f"edge ({u}, {v}) out of range for n={self.n}")
        object.__setattr__(self, "edges", norm)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(n, frozenset(normalize_edge(u, v) for u, v in edges))

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=np.uint8)
        for u, v in self.edges:
            adj[u, v] = adj[v, u] = 1
        adj.setflags(write=False)
        return adj

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    def __len__(self) -> int:
        return len(self.edges)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """The graph with every vertex ``u`` renamed to ``perm[u]``."""
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges))

    def to_text(self) -> str:
        lines = [f"n {self.n}"] + [f"{u} {v}" for u, v in self.sorted_edges]
        return "\n".join(lines) + "\n"

    @cached_property
    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()


@dataclass(frozen=True)
class CompositeGraph:
    """Two parts joined by exactly one edge.

    ``part_of[v]`` is 1 for vertices ``0..n1-1`` and 2 for the rest.
    """

    graph: Graph
    part_of: tuple[int, ...]
    connecting_edge: Edge
    name: str = field(default="", compare=False)

    def __post_init__(self):
        g = self.graph
        if len(self.part_of) != g.n or any(p not in (1, 2) for p in self.part_of):
            raise DataError("part_of must assign 1 or 2 to every vertex")
        a, b = normalize_edge(*self.connecting_edge)
        if (a, b) not in g.edges:
            raise DataError(f"connecting edge ({a}, {b}) is not an edge")
        if self.part_of[a] == self.part_of[b]:
            raise DataError("connecting edge must join the two parts")
        for u, v in g.edges:
            if (u, v) != (a, b) and self.part_of[u] != self.part_of[v]:
                raise DataError(f"edge ({u}, {v}) crosses parts but is not the connecting edge")
        object.__setattr__(self, "connecting_edge", (a, b))

    @property
    def n1(self) -> int:
        return self.part_of.count(1)

    def part_of_edge(self, edge: Edge) -> int:
        """1 or 2 for intra-part edges, 0 for the connecting edge."""
        u, v = normalize_edge(*edge)
        if (u, v) == self.connecting_edge:
            return 0
        return self.part_of[u]

    def to_text(self) -> str:
        a, b = self.connecting_edge
        return self.graph.to_text() + f"connecting {a} {b}\npart2_offset {self.n1}\n"


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    k: int
    params: Mapping[str, float] = field(default_factory=dict)
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpecError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.seed < 0:
            raise InvalidSpecError("seed must be unsigned")


def _complete(k):
    return [(i, j) for i in range(k) for j in range(i + 1, k)]


def _cycle(k):
    if k < 3:
        raise InvalidSpecError(f"cycle needs k >= 3, got {k}")
    return [(i, (i + 1) % k) for i in range(k)]


def _star(k):
    # leaves first, hub last
    if k < 2:
        raise InvalidSpecError(f"star needs k >= 2, got {k}")
    return [(i, k - 1) for i in range(k - 1)]


def _ladder(k):
    # rails 0..h-1 and h..k-1, rungs (i, i+h)
    if k < 4 or k % 2:
        raise InvalidSpecError(f"ladder needs even k >= 4, got {k}")
    h = k // 2
    rails = [(i, i + 1) for i in range(h - 1)] + [(h + i, h + i + 1) for i in range(h - 1)]
    return rails + [(i, i + h) for i in range(h)]


def _erdos_renyi(k, p, rng):
    """Each pair ``(u, v)``, ``u < v`` in lexicographic order, kept when one
    uniform draw is below ``p``."""
    if not 0.0 <= p <= 1.0:
        raise InvalidSpecError(f"erdos_renyi needs p in [0, 1], got {p}")
    pairs = _complete(k)
    draws = rng.random(len(pairs))
    return [e for e, x in zip(pairs, draws) if x < p]


def _barabasi_albert(k, m, rng):
    """Seed graph: star with hub 0 and leaves ``1..m``. Each new vertex
    ``v = m+1..k-1`` picks ``m`` distinct targets, one weighted draw at a time
    with probability proportional to current degree among unchosen vertices."""
    m = int(m)
    if m < 1 or k < m + 1:
        raise InvalidSpecError(f"barabasi_albert needs m >= 1 and k >= m+1, got k={k}, m={m}")
    edges = [(0, i) for i in range(1, m + 1)]
    deg = np.zeros(k)
    deg[0] = m
    deg[1 : m + 1] = 1
    for v in range(m + 1, k):
        weights = deg[:v].copy()
        chosen = []
        for _ in range(m):
            t = int(rng.choice(v, p=weights / weights.sum()))
            chosen.append(t)
            weights[t] = 0.0
        for t in sorted(chosen):
            edges.append((t, v))
            deg[t] += 1
        deg[v] = m
    return edges


def _watts_strogatz(k, k_deg, p, rng):
    """Ring lattice joining each vertex to its ``k_deg/2`` clockwise
    neighbours, then for ``j = 1..k_deg/2`` and ``u = 0..k-1`` the edge
    ``(u, u+j mod k)`` is rewired with probability ``p`` to a uniformly chosen
    vertex that is neither ``u`` nor already adjacent to ``u``."""
    k_deg = int(k_deg)
    if k_deg < 2 or k_deg % 2 or k_deg >= k:
        raise InvalidSpecError(f"watts_strogatz needs even 2 <= k_deg < k, got k={k}, k_deg={k_deg}")
    if not 0.0 <= p <= 1.0:
        raise InvalidSpecError(f"watts_strogatz needs p in [0, 1], got {p}")
    adj = [set() for _ in range(k)]
    for j in range(1, k_deg // 2 + 1):
        for u in range(k):
            w = (u + j) % k
            adj[u].add(w)
            adj[w].add(u)
    for j in range(1, k_deg // 2 + 1):
        for u in range(k):
            w = (u + j) % k
            if w not in adj[u] or rng.random() >= p:
                continue
            options = [x for x in range(k) if x != u and x not in adj[u]]
            if not options:
                continue
            new = options[int(rng.integers(len(options)))]
            adj[u].discard(w)
            adj[w].discard(u)
            adj[u].add(new)
            adj[new].add(u)
    return [(u, w) for u in range(k) for w in adj[u] if u < w]


def generate(spec: GeneratorSpec) -> Graph:
    k, params = spec.k, spec.params
    if k < 1:
        raise InvalidSpecError(f"k must be >= 1, got {k}")
    if spec.family == "complete":
        edges = _complete(k)
    elif spec.family == "cycle":
        edges = _cycle(k)
    elif spec.family == "star":
        edges = _star(k)
    elif spec.family == "ladder":
        edges = _ladder(k)
    else:
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        try:
            if spec.family == "erdos_renyi":
                edges = _erdos_renyi(k, float(params["p"]), rng)
            elif spec.family == "barabasi_albert":
                edges = _barabasi_albert(k, params["m"], rng)
            else:
                edges = _watts_strogatz(k, params["k_deg"], float(params["p"]), rng)
        except KeyError as exc:
            raise InvalidSpecError(f"{spec.family} is missing parameter {exc}") from None
    return Graph.from_edges(k, edges)


def connect(g1: Graph, g2: Graph, a: int = 0, b: int = 0, name: str = "") -> CompositeGraph:
    """Disjoint union with ``g2`` shifted by ``g1.n``, plus the edge
    ``(a, g1.n + b)``."""
    if g1.n < 1 or g2.n < 1:
        raise DataError("both parts need at least one vertex")
    if not (0 <= a < g1.n and 0 <= b < g2.n):
        raise DataError(f"attachment vertices ({a}, {b}) out of range")
    n1 = g1.n
    edges = set(g1.edges)
    edges.update((u + n1, v + n1) for u, v in g2.edges)
    link = (a, n1 + b)
    edges.add(link)
    graph = Graph(n1 + g2.n, frozenset(edges))
    return CompositeGraph(graph, (1,) * n1 + (2,) * g2.n, link, name)


def adjacency_matrix(g: Graph, perm: Sequence[int] | None = None) -> np.ndarray:
    """Adjacency of ``g`` relabeled by ``perm`` (vertex ``u`` becomes ``perm[u]``)."""
    m = np.zeros((g.n, g.n), dtype=np.uint8)
    if not g.edges:
        return m
    e = np.array(g.sorted_edges)
    if perm is not None:
        e = np.asarray(perm)[e]
    m[e[:, 0], e[:, 1]] = 1
    m[e[:, 1], e[:, 0]] = 1
    return m


def remove_edge(g: Graph, e: Sequence[int]) -> Graph:
    edge = normalize_edge(*e)
    if edge not in g.edges:
        raise EdgeNotFoundError(f"edge {edge} not in graph")
    return Graph(g.n, g.edges - {edge})


def connected_components(g: Graph) -> list[list[int]]:
    """Vertex sets of the components, each sorted, ordered by smallest vertex."""
    if g.n == 0:
        return []
    _, labels = _cc(csr_matrix(g.adjacency), directed=False)
    groups: dict[int, list[int]] = {}
    for v, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(v)
    return sorted(groups.values())


def write_graph(path, g: Graph | CompositeGraph) -> None:
    Path(path).write_text(g.to_text(), encoding="ascii", newline="\n")


def read_graph(path) -> Graph | CompositeGraph:
    """Parse the edge-list format; returns a composite when the file carries
    ``connecting``/``part2_offset`` lines."""
    path = Path(path)
    n = None
    edges = []
    connecting = offset = None
    for lineno, raw in enumerate(path.read_text(encoding="ascii").splitlines(), 1):
        fields = raw.split()
        if not fields:
            continue
        try:
            if fields[0] == "n" and len(fields) == 2 and n is None:
                n = int(fields[1])
            elif fields[0] == "connecting" and len(fields) == 3:
                connecting = (int(fields[1]), int(fields[2]))
            elif fields[0] == "part2_offset" and len(fields) == 2:
                offset = int(fields[1])
            elif len(fields) == 2 and n is not None:
                edges.append((int(fields[0]), int(fields[1])))
            else:
                raise ValueError
        except ValueError:
            raise GraphFormatError(f"{path}:{lineno}: cannot parse {raw!r}") from None
    if n is None:
        raise GraphFormatError(f"{path}: missing 'n <count>' header")
    graph = Graph.from_edges(n, edges)
    if connecting is None and offset is None:
        return graph
    if connecting is None or offset is None:
        raise GraphFormatError(f"{path}: 'connecting' and 'part2_offset' must appear together")
    if not 0 < offset < n:
        raise GraphFormatError(f"{path}: part2_offset {offset} out of range")
    part_of = tuple(1 if v < offset else 2 for v in range(n))
    return CompositeGraph(graph, part_of, connecting, path.stem)
