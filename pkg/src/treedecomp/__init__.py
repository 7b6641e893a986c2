"""Decomposing random graphs into prescribed families of trees."""

from __future__ import annotations

from .graph import Color, Graph, gen_colored_gnp, gen_gnp, parse_graph, format_graph
from .trees import Tree, RootedTree, ahu_canonical, parse_family, path_tree, star_tree, tree_by_name
from .htree import EngineParams, decompose_H
from .total import Decomposition, PhaseError, TotalParams, decompose_total, parse_decomposition
from .verify import Violation, brute_force_packing, brute_force_total, verify_decomposition

__all__ = [
    "Color",
    "Decomposition",
    "EngineParams",
    "Graph",
    "PhaseError",
    "RootedTree",
    "TotalParams",
    "Tree",
    "Violation",
    "ahu_canonical",
    "brute_force_packing",
    "brute_force_total",
    "decompose_H",
    "decompose_total",
    "format_graph",
    "gen_colored_gnp",
    "gen_gnp",
    "parse_decomposition",
    "parse_family",
    "parse_graph",
    "path_tree",
    "star_tree",
    "tree_by_name",
    "verify_decomposition",
]
