"""CTM lookup tables for square binary blocks.

A table maps every ``l x l`` binary block to its CTM complexity (bits).
Tables are stored densely: the block's row-major bit string, read as a
binary number with the first bit most significant, is the array index.

CSV format, one record per line::

    # source: free-form provenance (optional, first comment wins)
    000000000,13.713356989265957
    000000001,14.914491375110648

No header row, ``#`` starts a comment line, LF line endings.
"""

from __future__ import annotations

import gzip
import math
import pickle
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DataError

SIDES = (2, 3, 4)
DEFAULT_SIDE = 3

_PACKAGED = {3: "ctm2d-l3.csv", 4: "ctm2d-l4.csv"}


class CtmTableError(DataError):
    pass


class MissingEntryError(CtmTableError):
    pass


class DuplicateEntryError(CtmTableError):
    pass


class MalformedLineError(CtmTableError):
    pass


class NonPositiveValueError(CtmTableError):
    pass


class SideMismatchError(CtmTableError):
    pass


def _check_side(side: int) -> None:
    if side not in SIDES:
        raise ValueError(f"block side must be one of {SIDES}, got {side!r}")


@dataclass(frozen=True)
class BlockKey:
    """An ``l x l`` binary block in row-major order."""

    bits: tuple[int, ...]
    side: int

    def __post_init__(self):
        if len(self.bits) != self.side * self.side:
            raise ValueError(
                f"block of side {self.side} needs {self.side ** 2} bits, got {len(self.bits)}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("block bits must be 0 or 1")

    @classmethod
    def from_string(cls, text: str, side: int | None = None) -> "BlockKey":
        if side is None:
            side = math.isqrt(len(text))
        if any(ch not in "01" for ch in text):
            raise ValueError(f"not a binary block: {text!r}")
        return cls(tuple(int(ch) for ch in text), side)

    @classmethod
    def from_code(cls, code: int, side: int) -> "BlockKey":
        return cls.from_string(format(code, f"0{side * side}b"), side)

    @classmethod
    def from_array(cls, block) -> "BlockKey":
        arr = np.asarray(block)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("block must be a square 2D array")
        return cls(tuple(int(b) for b in arr.flat), arr.shape[0])

    @property
    def code(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class CtmTable:
    """Complete CTM table for one block side.

    ``values[code]`` is the complexity of the block whose bit string has
    integer value ``code``. The array is read-only.
    """

    side: int
    values: np.ndarray = field(repr=False)
    source_id: str = ""

    def __post_init__(self):
        _check_side(self.side)
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (1 << (self.side * self.side),):
            raise MissingEntryError(
                f"side {self.side} table needs {1 << self.side ** 2} values, got {values.size}"
            )
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise NonPositiveValueError("CTM values must be finite and > 0")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, block: BlockKey) -> float:
        return lookup(self, block)

    @property
    def entries(self) -> dict[BlockKey, float]:
        return {BlockKey.from_code(c, self.side): float(v) for c, v in enumerate(self.values)}

    @classmethod
    def from_mapping(cls, side: int, entries: Mapping[BlockKey, float], source_id: str = "") -> "CtmTable":
        _check_side(side)
        values = np.full(1 << (side * side), np.nan)
        for key, value in entries.items():
            if key.side != side:
                raise SideMismatchError(f"key of side {key.side} in a side-{side} table")
            values[key.code] = value
        missing = int(np.isnan(values).sum())
        if missing:
            raise MissingEntryError(f"{missing} of {values.size} blocks have no value")
        return cls(side, values, source_id)


def lookup(table: CtmTable, block: BlockKey) -> float:
    if block.side != table.side:
        raise SideMismatchError(f"block side {block.side} against a side-{table.side} table")
    return float(table.values[block.code])


def make_uniform_table(side: int, value: float) -> CtmTable:
    _check_side(side)
    if not value > 0:
        raise ValueError(f"uniform CTM value must be > 0, got {value!r}")
    return CtmTable(side, np.full(1 << (side * side), float(value)), "uniform")


def _parse_lines(lines: Iterable[str], side: int, origin: str) -> tuple[np.ndarray, str]:
    width = side * side
    values = np.full(1 << width, np.nan)
    source_id = ""
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n").rstrip("\r")
        if line.startswith("#"):
            body = line[1:].strip()
            if not source_id and body.lower().startswith("source:"):
                source_id = body[len("source:"):].strip()
            continue
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedLineError(f"{origin}:{lineno}: expected '<bits>,<value>', got {line!r}")
        bits, text = parts[0].strip(), parts[1].strip()
        if len(bits) != width or any(ch not in "01" for ch in bits):
            raise MalformedLineError(f"{origin}:{lineno}: block must be {width} binary digits, got {bits!r}")
        try:
            value = float(text)
        except ValueError:
            raise MalformedLineError(f"{origin}:{lineno}: value is not a decimal real: {text!r}") from None
        if not math.isfinite(value):
            raise MalformedLineError(f"{origin}:{lineno}: value must be finite, got {text!r}")
        if value <= 0:
            raise NonPositiveValueError(f"{origin}:{lineno}: value must be > 0, got {text!r}")
        code = int(bits, 2)
        if not np.isnan(values[code]):
            raise DuplicateEntryError(f"{origin}:{lineno}: duplicate block {bits}")
        values[code] = value
    missing = int(np.isnan(values).sum())
    if missing:
        first = format(int(np.flatnonzero(np.isnan(values))[0]), f"0{width}b")
        raise MissingEntryError(
            f"{origin}: {missing} of {values.size} blocks missing (first: {first})"
        )
    return values, source_id


def load_ctm_table(path, side: int) -> CtmTable:
    """Load and validate a CSV table; every block must appear exactly once."""
    _check_side(side)
    path = Path(path)
    with open(path, encoding="ascii", newline="") as fh:
        values, source_id = _parse_lines(fh, side, str(path))
    return CtmTable(side, values, source_id or path.name)


def save_ctm_table(table: CtmTable, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        if table.source_id:
            fh.write(f"# source: {table.source_id}\n")
        width = table.side * table.side
        for code, value in enumerate(table.values):
            fh.write(f"{code:0{width}b},{float(value)!r}\n")


def default_table(side: int = DEFAULT_SIDE) -> CtmTable:
    """The packaged 2D CTM table (``side`` 3 or 4)."""
    if side not in _PACKAGED:
        raise ValueError(f"no packaged table for side {side}; available: {sorted(_PACKAGED)}")
    ref = resources.files("bdmgraph") / "data" / _PACKAGED[side]
    with resources.as_file(ref) as path:
        return load_ctm_table(path, side)


def convert_pybdm_dataset(path, side: int) -> CtmTable:
    """Expand PyBDM's pickled 2D dataset (``ctm-b2-d4x4.pkl.gz``) to a full table.

    PyBDM stores one entry per complement pair, keyed by the member whose
    first bit is 0. Only unpickle files you trust.
    """
    _check_side(side)
    path = Path(path)
    with gzip.open(path, "rb") as fh:
        data = pickle.load(fh)
    try:
        shaped = data[(side, side)]
    except (KeyError, TypeError):
        raise CtmTableError(f"{path}: no ({side}, {side}) blocks in dataset") from None
    width = side * side
    values = np.empty(1 << width)
    for code in range(values.size):
        bits = format(code, f"0{width}b")
        if bits[0] == "1":
            bits = bits.translate(str.maketrans("01", "10"))
        try:
            values[code] = float(shaped[bits])
        except KeyError:
            raise MissingEntryError(f"{path}: dataset has no value for {bits}") from None
    return CtmTable(side, values, f"pybdm:{path.name}:{side}x{side}:complement-expanded")
