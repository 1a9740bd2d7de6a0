"""Compiled inner loops for edge perturbation sweeps.

Work is split into chunks that do not depend on the thread count:

* prefix chunks: all permutations sharing a fixed prefix of length
  ``depth``; chunk ``c`` is the lexicographic rank range
  ``[c * (n-depth)!, (c+1) * (n-depth)!)``;
* row chunks: consecutive rows of an explicit permutation array.

Each chunk accumulates per-edge contributions with Neumaier summation in
a fixed order, so the partial sums are identical under any thread count.

Block codes follow :func:`bdmgraph.bdm.block_codes`. Removing an edge only
flips the bits of the tiles its two matrix cells fall into, so each
contribution is computed by updating multiplicities of those tiles only.
"""

import os

import numpy as np
from numba import config, njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the default probe warns about old TBB builds; OpenMP ships with numba wheels
    config.THREADING_LAYER = "omp"


@njit(cache=True)
def build_occurrences(n, l):
    """For every matrix cell ``(a, b)``: the tiles and bit masks where it
    appears in the periodically padded matrix."""
    size = ((n + l - 1) // l) * l
    nb = size // l
    reps = (size + n - 1) // n
    cap = reps * reps
    blk = np.zeros((n, n, cap), np.int64)
    mask = np.zeros((n, n, cap), np.int64)
    cnt = np.zeros((n, n), np.int64)
    for i in range(size):
        for j in range(size):
            a = i % n
            b = j % n
            k = cnt[a, b]
            blk[a, b, k] = (i // l) * nb + j // l
            mask[a, b, k] = np.int64(1) << (l * l - 1 - ((i % l) * l + j % l))
            cnt[a, b] = k + 1
    return blk, mask, cnt


@njit(cache=True)
def _count(codes, c):
    m = 0
    for k in range(codes.shape[0]):
        if codes[k] == c:
            m += 1
    return m


@njit(cache=True)
def _perm_contrib(p, eu, ev, blk, mask, cnt, ctm, log2tab, codes, ablk, amask, out):
    """``out[e] = bdm(X) - bdm(X without edge e)`` where ``X`` is the
    adjacency of the graph relabeled by ``p``."""
    ne = eu.shape[0]
    codes[:] = 0
    for e in range(ne):
        w = p[eu[e]]
        x = p[ev[e]]
        for k in range(cnt[w, x]):
            codes[blk[w, x, k]] |= mask[w, x, k]
        for k in range(cnt[x, w]):
            codes[blk[x, w, k]] |= mask[x, w, k]
    for e in range(ne):
        w = p[eu[e]]
        x = p[ev[e]]
        na = 0
        for side in range(2):
            a = w if side == 0 else x
            b = x if side == 0 else w
            for k in range(cnt[a, b]):
                bi = blk[a, b, k]
                found = False
                for t in range(na):
                    if ablk[t] == bi:
                        amask[t] |= mask[a, b, k]
                        found = True
                        break
                if not found:
                    ablk[na] = bi
                    amask[na] = mask[a, b, k]
                    na += 1
        # delta = bdm(Y) - bdm(X), applied one tile at a time
        delta = 0.0
        for t in range(na):
            bi = ablk[t]
            old = codes[bi]
            new = old ^ amask[t]
            m = _count(codes, old)
            if m == 1:
                delta -= ctm[old]
            else:
                delta -= log2tab[m] - log2tab[m - 1]
            codes[bi] = new
            m = _count(codes, new)
            if m == 1:
                delta += ctm[new]
            else:
                delta += log2tab[m] - log2tab[m - 1]
        for t in range(na - 1, -1, -1):
            codes[ablk[t]] ^= amask[t]
        out[e] = -delta


@njit(cache=True)
def _neumaier(s, c, v):
    for e in range(v.shape[0]):
        x = v[e]
        t = s[e] + x
        if abs(s[e]) >= abs(x):
            c[e] += (s[e] - t) + x
        else:
            c[e] += (x - t) + s[e]
        s[e] = t


@njit(cache=True)
def chunk_start(c, n, depth):
    """First permutation (lexicographic) of prefix chunk ``c``."""
    avail = np.arange(n)
    navail = n
    p = np.empty(n, np.int64)
    rem = c
    for i in range(depth):
        w = 1
        for k in range(i + 1, depth):
            w *= n - k
        d = rem // w
        rem = rem % w
        p[i] = avail[d]
        for k in range(d, navail - 1):
            avail[k] = avail[k + 1]
        navail -= 1
    for i in range(navail):
        p[depth + i] = avail[i]
    return p


@njit(cache=True)
def _next_perm_from(p, lo):
    n = p.shape[0]
    i = n - 2
    while i >= lo and p[i] >= p[i + 1]:
        i -= 1
    if i < lo:
        return False
    j = n - 1
    while p[j] <= p[i]:
        j -= 1
    tmp = p[i]
    p[i] = p[j]
    p[j] = tmp
    a = i + 1
    b = n - 1
    while a < b:
        tmp = p[a]
        p[a] = p[b]
        p[b] = tmp
        a += 1
        b -= 1
    return True


@njit(cache=True)
def _first_violation(p, ci, cj):
    # pairs are sorted by cj, so the first hit has the smallest position
    for t in range(ci.shape[0]):
        if p[cj[t]] < p[ci[t]]:
            return cj[t]
    return p.shape[0]


@njit(cache=True)
def _skip_subtree(p, j):
    # arrange p[j+1:] descending so the next step changes a position <= j
    tail = np.sort(p[j + 1 :])
    m = tail.shape[0]
    for k in range(m):
        p[j + 1 + k] = tail[m - 1 - k]


@njit(parallel=True, cache=True)
def sweep_prefix_chunks(chunk_ids, n, depth, nblocks, eu, ev, blk, mask, cnt, ctm, log2tab, ci, cj, sums, counts):
    """Accumulate contributions over the permutations of each prefix chunk
    that satisfy ``p[ci[t]] < p[cj[t]]`` for every constraint ``t``."""
    ne = eu.shape[0]
    for q in prange(chunk_ids.shape[0]):
        p = chunk_start(chunk_ids[q], n, depth)
        codes = np.zeros(nblocks, np.int64)
        ablk = np.zeros(2 * blk.shape[2], np.int64)
        amask = np.zeros(2 * blk.shape[2], np.int64)
        out = np.zeros(ne)
        s = np.zeros(ne)
        c = np.zeros(ne)
        used = 0
        while True:
            j = _first_violation(p, ci, cj)
            if j == n:
                _perm_contrib(p, eu, ev, blk, mask, cnt, ctm, log2tab, codes, ablk, amask, out)
                _neumaier(s, c, out)
                used += 1
            elif j < depth:
                break
            else:
                _skip_subtree(p, j)
            if not _next_perm_from(p, depth):
                break
        for e in range(ne):
            sums[q, e] = s[e] + c[e]
        counts[q] = used


@njit(parallel=True, cache=True)
def sweep_rows(perms, bounds, nblocks, eu, ev, blk, mask, cnt, ctm, log2tab, sums, counts):
    """Accumulate contributions over ``perms[bounds[q]:bounds[q+1]]`` per chunk ``q``."""
    ne = eu.shape[0]
    for q in prange(bounds.shape[0] - 1):
        codes = np.zeros(nblocks, np.int64)
        ablk = np.zeros(2 * blk.shape[2], np.int64)
        amask = np.zeros(2 * blk.shape[2], np.int64)
        out = np.zeros(ne)
        s = np.zeros(ne)
        c = np.zeros(ne)
        for r in range(bounds[q], bounds[q + 1]):
            _perm_contrib(perms[r], eu, ev, blk, mask, cnt, ctm, log2tab, codes, ablk, amask, out)
            _neumaier(s, c, out)
        for e in range(ne):
            sums[q, e] = s[e] + c[e]
        counts[q] = bounds[q + 1] - bounds[q]


@njit(parallel=True, cache=True)
def count_prefix_chunks(chunk_ids, n, depth, ci, cj, counts):
    """Number of constrained permutations in each prefix chunk."""
    for q in prange(chunk_ids.shape[0]):
        p = chunk_start(chunk_ids[q], n, depth)
        used = 0
        while True:
            j = _first_violation(p, ci, cj)
            if j == n:
                used += 1
            elif j < depth:
                break
            else:
                _skip_subtree(p, j)
            if not _next_perm_from(p, depth):
                break
        counts[q] = used
