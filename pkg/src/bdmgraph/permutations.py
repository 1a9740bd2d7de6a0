"""Symmetric-group enumeration, automorphisms and automorphic subsets.

A permutation is a tuple ``p`` with ``p[u]`` the new label of vertex ``u``.
Applying ``p`` to a graph gives ``G^p`` with edges ``(p[u], p[v])``.

Two permutations land in the same automorphic subset when they produce the
identical labeled graph. ``G^p == G^q`` iff ``q^-1 . p`` is an automorphism,
so the subsets are the left cosets ``p . Aut(G)`` and there are
``n! / |Aut(G)|`` of them.

The representative of a subset is its first member in lexicographic order.
``p`` is that member iff for every position ``i``, ``p[i] < p[j]`` for each
``j != i`` in the orbit of ``i`` under the automorphisms fixing
``0..i-1`` pointwise. Representatives are therefore streamed directly with
a constrained depth-first search; no key set is held in memory.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import DataError, ResourceLimitError
from .graph_core import Graph, adjacency_matrix

Permutation = tuple[int, ...]

MAX_ENUMERATION_N = 13
MAX_GROUP_MATERIALIZE = 5_000_000
SAMPLE_CHUNK = 1 << 16

SOURCE_KINDS = ("symmetric_group", "automorphic_subsets", "random_sample")


class TooLargeError(ResourceLimitError):
    pass


def _guard(n: int) -> None:
    if n > MAX_ENUMERATION_N:
        raise TooLargeError(f"n={n} exceeds the enumeration guard n <= {MAX_ENUMERATION_N}")


def identity(n: int) -> Permutation:
    return tuple(range(n))


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def inverse(p: Sequence[int]) -> Permutation:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def compose(p: Sequence[int], q: Sequence[int]) -> Permutation:
    """``p . q``: apply ``q`` first, then ``p``."""
    return tuple(p[x] for x in q)


def rank_permutation(p: Sequence[int]) -> int:
    """Lexicographic rank of ``p`` among permutations of ``0..n-1``."""
    n = len(p)
    avail = list(range(n))
    rank = 0
    for i, x in enumerate(p):
        j = avail.index(x)
        rank += j * math.factorial(n - 1 - i)
        avail.pop(j)
    return rank


def unrank_permutation(rank: int, n: int) -> Permutation:
    if not 0 <= rank < math.factorial(n):
        raise ValueError(f"rank {rank} out of range for n={n}")
    avail = list(range(n))
    out = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        j, rank = divmod(rank, f)
        out.append(avail.pop(j))
    return tuple(out)


def _next_permutation(p: list[int]) -> bool:
    i = len(p) - 2
    while i >= 0 and p[i] >= p[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = len(p) - 1
    while p[j] <= p[i]:
        j -= 1
    p[i], p[j] = p[j], p[i]
    p[i + 1 :] = reversed(p[i + 1 :])
    return True


def iterate_symmetric_group(n: int, start: int = 0, stop: int | None = None) -> Iterator[Permutation]:
    """All permutations of ``0..n-1`` with rank in ``[start, stop)``, in
    lexicographic order. Disjoint rank ranges can be consumed in parallel."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _guard(n)
    total = math.factorial(n)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    if start == 0 and stop == total:
        yield from itertools.permutations(range(n))
        return
    p = list(unrank_permutation(start, n))
    for _ in range(stop - start):
        yield tuple(p)
        _next_permutation(p)


def is_automorphism(g: Graph, p: Sequence[int]) -> bool:
    return all((min(p[u], p[v]), max(p[u], p[v])) in g.edges for u, v in g.edges)


class _Searcher:
    """Backtracking over vertex images, pruned by a degree-based colouring
    (degree, then sorted neighbour degrees) and adjacency consistency."""

    def __init__(self, g: Graph):
        self.n = g.n
        self.adj = [0] * g.n
        for u, v in g.edges:
            self.adj[u] |= 1 << v
            self.adj[v] |= 1 << u
        deg = g.degrees
        self.color = [
            (deg[v], tuple(sorted(deg[u] for u in range(g.n) if self.adj[v] >> u & 1)))
            for v in range(g.n)
        ]

    def extensions(self, pinned: dict[int, int]) -> Iterator[Permutation]:
        n, adj, color = self.n, self.adj, self.color
        img = [-1] * n
        used = [False] * n

        def rec(v: int):
            if v == n:
                yield tuple(img)
                return
            want = 0
            for u in range(v):
                if adj[v] >> u & 1:
                    want |= 1 << img[u]
            placed = 0
            for u in range(v):
                placed |= 1 << img[u]
            cands = (pinned[v],) if v in pinned else range(n)
            for w in cands:
                if used[w] or color[w] != color[v]:
                    continue
                if adj[w] & placed != want:
                    continue
                img[v] = w
                used[w] = True
                yield from rec(v + 1)
                used[w] = False
            img[v] = -1

        yield from rec(0)

    def find(self, pinned: dict[int, int]) -> Permutation | None:
        return next(self.extensions(pinned), None)


@dataclass(frozen=True)
class StabilizerChain:
    """``orbits[i]``: orbit of ``i`` under automorphisms fixing ``0..i-1``.
    ``transversals[i][j]``: one such automorphism sending ``i`` to ``j``."""

    n: int
    orbits: tuple[tuple[int, ...], ...]
    transversals: tuple[dict[int, Permutation], ...]

    @property
    def order(self) -> int:
        return math.prod(len(o) for o in self.orbits)

    @cached_property
    def generators(self) -> tuple[Permutation, ...]:
        ident = identity(self.n)
        gens = {t for level in self.transversals for t in level.values()}
        gens.discard(ident)
        return tuple(sorted(gens))

    @cached_property
    def constraints(self) -> tuple[tuple[int, int], ...]:
        """Pairs ``(i, j)``, ``i < j``: a lexicographically first coset member
        has ``p[i] < p[j]``. Sorted by ``j``."""
        pairs = [(i, j) for i, orb in enumerate(self.orbits) for j in orb if j != i]
        return tuple(sorted(pairs, key=lambda ij: (ij[1], ij[0])))


def stabilizer_chain(g: Graph) -> StabilizerChain:
    _guard(g.n)
    search = _Searcher(g)
    orbits, transversals = [], []
    for i in range(g.n):
        base = {k: k for k in range(i)}
        level = {i: identity(g.n)}
        for j in range(i + 1, g.n):
            if search.color[j] != search.color[i]:
                continue
            found = search.find({**base, i: j})
            if found is not None:
                level[j] = found
        orbits.append(tuple(sorted(level)))
        transversals.append(level)
    return StabilizerChain(g.n, tuple(orbits), tuple(transversals))


def automorphism_count(g: Graph) -> int:
    return stabilizer_chain(g).order


def automorphism_group(g: Graph) -> set[Permutation]:
    """Every automorphism of ``g``, materialised from the stabilizer chain."""
    chain = stabilizer_chain(g)
    if chain.order > MAX_GROUP_MATERIALIZE:
        raise TooLargeError(
            f"|Aut| = {chain.order} exceeds the materialisation limit {MAX_GROUP_MATERIALIZE}"
        )
    elements = [identity(g.n)]
    for level in reversed(chain.transversals):
        elements = [compose(t, a) for t in level.values() for a in elements]
    return set(elements)


def automorphic_subset_count(g: Graph) -> int:
    return math.factorial(g.n) // automorphism_count(g)


def subset_key(g: Graph, p: Sequence[int]) -> bytes:
    """Packed upper triangle of the adjacency of ``G^p``."""
    m = adjacency_matrix(g, p)
    return np.packbits(m[np.triu_indices(g.n, 1)]).tobytes()


def automorphic_subsets(g: Graph) -> dict[bytes, list[Permutation]]:
    """Partition of the symmetric group by labeled-graph key, first-seen
    order. Holds all ``n!`` permutations; meant for small ``n``."""
    _guard(g.n)
    groups: dict[bytes, list[Permutation]] = {}
    for p in itertools.permutations(range(g.n)):
        groups.setdefault(subset_key(g, p), []).append(p)
    return groups


def representatives_by_key(g: Graph) -> Iterator[Permutation]:
    """First permutation per subset key, scanning the symmetric group in
    order. Memory grows with the number of subsets."""
    _guard(g.n)
    seen: set[bytes] = set()
    for p in itertools.permutations(range(g.n)):
        key = subset_key(g, p)
        if key not in seen:
            seen.add(key)
            yield p


def automorphic_subset_representatives(g: Graph) -> Iterator[Permutation]:
    """One permutation per automorphic subset, each the lexicographically
    first member of its subset, yielded in lexicographic order."""
    if g.n < 1:
        raise ValueError("graph needs at least one vertex")
    chain = stabilizer_chain(g)
    n = g.n
    above: list[list[int]] = [[] for _ in range(n)]
    for i, j in chain.constraints:
        above[j].append(i)
    p = [0] * n
    used = [False] * n

    def rec(pos: int):
        if pos == n:
            yield tuple(p)
            return
        floor = max((p[i] for i in above[pos]), default=-1)
        for x in range(floor + 1, n):
            if used[x]:
                continue
            p[pos] = x
            used[x] = True
            yield from rec(pos + 1)
            used[x] = False

    yield from rec(0)


def _sample_chunk(n: int, rows: int, seed: int, chunk: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    return rng.permuted(np.tile(np.arange(n, dtype=np.int64), (rows, 1)), axis=1)


def sample_chunks(n: int, k: int, seed: int, first: int = 0, last: int | None = None):
    """Yield ``(chunk_index, rows)`` arrays of the sample stream.

    Chunk ``c`` holds draws ``c*SAMPLE_CHUNK ..`` and is generated from its
    own ``SeedSequence(seed, spawn_key=(c,))``, so any chunk can be rebuilt
    without replaying the ones before it.
    """
    nchunks = -(-k // SAMPLE_CHUNK)
    last = nchunks if last is None else min(last, nchunks)
    for c in range(first, last):
        rows = min(SAMPLE_CHUNK, k - c * SAMPLE_CHUNK)
        yield c, _sample_chunk(n, rows, seed, c)


def sample_permutations(n: int, k: int, seed: int) -> Iterator[Permutation]:
    """``k`` uniform permutations drawn with replacement; fixed per seed."""
    if k < 1:
        raise ValueError("sample size must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    for _, rows in sample_chunks(n, k, seed):
        for row in rows:
            yield tuple(int(x) for x in row)


@dataclass(frozen=True)
class PermSource:
    kind: str
    sample_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise DataError(f"unknown permutation source {self.kind!r}; expected one of {SOURCE_KINDS}")
        if self.kind == "random_sample":
            if self.sample_size is None or self.sample_size < 1:
                raise DataError("random_sample needs sample_size >= 1")
            if self.seed < 0:
                raise DataError("seed must be unsigned")

    @classmethod
    def symmetric_group(cls) -> "PermSource":
        return cls("symmetric_group")

    @classmethod
    def automorphic_subsets(cls) -> "PermSource":
        return cls("automorphic_subsets")

    @classmethod
    def random_sample(cls, sample_size: int, seed: int = 0) -> "PermSource":
        return cls("random_sample", sample_size, seed)

    def total(self, g: Graph) -> int:
        if self.kind == "symmetric_group":
            _guard(g.n)
            return math.factorial(g.n)
        if self.kind == "automorphic_subsets":
            return automorphic_subset_count(g)
        return self.sample_size

    def iterate(self, g: Graph) -> Iterator[Permutation]:
        if self.kind == "symmetric_group":
            return iterate_symmetric_group(g.n)
        if self.kind == "automorphic_subsets":
            return automorphic_subset_representatives(g)
        return sample_permutations(g.n, self.sample_size, self.seed)

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "random_sample":
            out.update(sample_size=self.sample_size, seed=self.seed)
        return out
