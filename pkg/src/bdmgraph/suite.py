"""The 30 composite test graphs.

Each row joins two generated parts with one edge. Random families use
p=0.5 (Erdos-Renyi), m=2 (Barabasi-Albert) and k_deg=4, p=0.5
(Watts-Strogatz), all seeded with ``DEFAULT_SEED``.

The connecting edge joins the last vertex of the first part to vertex 0
(a leaf, for stars) of the second. A ladder's last vertex is a corner,
which gives the wrong subset counts; ladders in first position attach at
vertex 4, the middle of the second rail. These choices reproduce the
listed subset counts and the per-row representative-set distances.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .errors import DataError
from .graph_core import DEFAULT_SEED, CompositeGraph, GeneratorSpec, connect, generate

_FAMILY_NAMES = {
    "complete": "complete",
    "cycle": "cycle",
    "star": "star",
    "ladder": "ladder",
    "random": "erdos_renyi",
    "barabasi-albert": "barabasi_albert",
    "watts-strogatz": "watts_strogatz",
}

_PARAMS = {
    "erdos_renyi": {"p": 0.5},
    "barabasi_albert": {"m": 2},
    "watts_strogatz": {"k_deg": 4, "p": 0.5},
}


@dataclass(frozen=True)
class SuiteRow:
    label: str
    n: int
    n_edges: int
    subsets: int
    attach: tuple[int, int] | None = None

    @property
    def slug(self) -> str:
        return slugify(self.label)

    @property
    def deterministic(self) -> bool:
        return all(spec.family in ("complete", "cycle", "star", "ladder") for spec in self.parts())

    def parts(self, seed: int = DEFAULT_SEED) -> tuple[GeneratorSpec, GeneratorSpec]:
        return tuple(parse_part(x, seed) for x in self.label.split(" - "))

    def build(self, seed: int = DEFAULT_SEED) -> CompositeGraph:
        g1, g2 = (generate(s) for s in self.parts(seed))
        a, b = self.attach if self.attach is not None else (g1.n - 1, 0)
        return connect(g1, g2, a, b, name=self.label)


# label, |V|, |E|, automorphic subsets as listed
SUITE: tuple[SuiteRow, ...] = (
    SuiteRow("Complete4 - Cycle5", 9, 12, 30_240),
    SuiteRow("Complete5 - Cycle4", 9, 15, 7_560),
    SuiteRow("Complete4 - Random5", 9, 13, 30_240),
    SuiteRow("Complete5 - Cycle5", 10, 16, 75_600),
    SuiteRow("Complete5 - Star5", 10, 15, 25_200),
    SuiteRow("Complete5 - Complete5", 10, 21, 3_150),
    SuiteRow("Star5 - Random5", 10, 11, 604_800),
    SuiteRow("Random5 - Random5", 10, 13, 1_814_400),
    SuiteRow("Cycle5 - Star5", 10, 10, 302_400),
    SuiteRow("Cycle4 - Star6", 10, 10, 75_600),
    SuiteRow("Cycle5 - Ladder6", 11, 13, 19_958_400),
    SuiteRow("Cycle5 - Random6", 11, 15, 19_958_400),
    SuiteRow("Watts-Strogatz6 - Cycle5", 11, 18, 3_326_400),
    SuiteRow("Complete5 - Random6", 11, 20, 1_663_200),
    SuiteRow("Cycle5 - Star6", 11, 11, 831_600),
    SuiteRow("Watts-Strogatz6 - Complete5", 11, 23, 277_200),
    SuiteRow("Watts-Strogatz6 - Star5", 11, 17, 1_108_800),
    SuiteRow("Barabási–Albert7 - Complete4", 11, 17, 3_326_400),
    SuiteRow("Barabási–Albert7 - Cycle4", 11, 15, 9_979_200),
    SuiteRow("Barabási–Albert6 - Random5", 11, 15, 19_958_400),
    SuiteRow("Random6 - Random5", 11, 16, 39_916_800),
    SuiteRow("Complete6 - Complete5", 11, 26, 13_860),
    SuiteRow("Ladder6 - Random5", 11, 14, 19_958_400, attach=(4, 0)),
    SuiteRow("Ladder6 - Complete5", 11, 18, 831_600, attach=(4, 0)),
    SuiteRow("Ladder6 - Star5", 11, 12, 3_326_400, attach=(4, 0)),
    SuiteRow("Watts-Strogatz6 - Random6", 12, 22, 79_833_600),
    SuiteRow("Watts-Strogatz7 - Complete5", 12, 25, 19_958_400),
    SuiteRow("Watts-Strogatz7 - Star5", 12, 19, 79_833_600),
    SuiteRow("Barabási–Albert7 - Star5", 12, 15, 39_916_800),
    SuiteRow("Complete6 - Complete6", 12, 31, 16_632),
)


def slugify(label: str) -> str:
    text = unicodedata.normalize("NFKD", label.replace("\u2013", "-"))
    text = text.encode("ascii", "ignore").decode()
    text = re.sub(r"[^a-z0-9]+", "-", text.lower())
    return text.strip("-")


def parse_part(text: str, seed: int = DEFAULT_SEED) -> GeneratorSpec:
    """``"Watts-Strogatz6"`` -> watts_strogatz spec on 6 vertices."""
    m = re.fullmatch(r"(.+?)(\d+)", slugify(text))
    if not m or m.group(1) not in _FAMILY_NAMES:
        raise DataError(f"cannot parse graph part {text!r}")
    family = _FAMILY_NAMES[m.group(1)]
    return GeneratorSpec(family, int(m.group(2)), _PARAMS.get(family, {}), seed)


def find_row(name: str) -> SuiteRow:
    key = slugify(name)
    for row in SUITE:
        if row.slug == key:
            return row
    raise DataError(f"unknown suite row {name!r}")
