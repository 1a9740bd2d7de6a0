"""Edge perturbation analysis of composite graphs with 2D BDM."""

from __future__ import annotations

from .bdm import bdm2d, partition_periodic
from .ctm_table import BlockKey, CtmTable, default_table, load_ctm_table, lookup, make_uniform_table
from .errors import BdmGraphError, DataError, ResourceLimitError
from .graph_core import CompositeGraph, GeneratorSpec, Graph, connect, generate, read_graph, write_graph
from .permutations import (
    PermSource,
    automorphic_subset_count,
    automorphic_subset_representatives,
    automorphism_count,
    automorphism_group,
)
from .perturbation import EdgeInfoReport, average_info, edge_info_single, run_stats

__version__ = "0.1.0"

__all__ = [
    "BdmGraphError",
    "BlockKey",
    "CompositeGraph",
    "CtmTable",
    "DataError",
    "EdgeInfoReport",
    "GeneratorSpec",
    "Graph",
    "PermSource",
    "ResourceLimitError",
    "automorphic_subset_count",
    "automorphic_subset_representatives",
    "automorphism_count",
    "automorphism_group",
    "average_info",
    "bdm2d",
    "connect",
    "default_table",
    "edge_info_single",
    "generate",
    "load_ctm_table",
    "lookup",
    "make_uniform_table",
    "partition_periodic",
    "read_graph",
    "run_stats",
    "write_graph",
]
