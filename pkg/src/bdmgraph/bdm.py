"""Two-dimensional block decomposition (BDM) with periodic boundaries.

A matrix whose side is not a multiple of the block side ``l`` is extended
periodically: its leading rows, then leading columns, are appended until
the side is a multiple of ``l``. The result is tiled into disjoint blocks
and

    bdm = sum over distinct blocks b of  CTM(b) + log2(multiplicity(b))
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .ctm_table import BlockKey, CtmTable, SideMismatchError


def as_bitmatrix(m) -> np.ndarray:
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("matrix entries must be 0 or 1")
    return arr.astype(np.uint8, copy=False)


def pad_periodic(m, l: int) -> np.ndarray:
    m = as_bitmatrix(m)
    pad = (-m.shape[0]) % l
    return np.pad(m, ((0, pad), (0, pad)), mode="wrap") if pad else m


def block_codes(m, l: int) -> np.ndarray:
    """Integer code of every tile, row-major over tiles. A tile's code is its
    row-major bit string read with the first bit most significant."""
    x = pad_periodic(m, l)
    nb = x.shape[0] // l
    tiles = x.reshape(nb, l, nb, l).transpose(0, 2, 1, 3).reshape(nb * nb, l * l)
    weights = 1 << np.arange(l * l - 1, -1, -1, dtype=np.int64)
    return tiles.astype(np.int64) @ weights


def partition_periodic(m, l: int) -> Counter:
    """Multiset of tiles as ``Counter[BlockKey]``."""
    if l not in (2, 3, 4):
        raise ValueError(f"block side must be 2, 3 or 4, got {l}")
    return Counter(BlockKey.from_code(int(c), l) for c in block_codes(m, l))


def bdm2d(m, table: CtmTable, l: int | None = None) -> float:
    if l is not None and l != table.side:
        raise SideMismatchError(f"block side {l} against a side-{table.side} table")
    codes, counts = np.unique(block_codes(m, table.side), return_counts=True)
    return math.fsum(table.values[codes]) + math.fsum(np.log2(counts))
