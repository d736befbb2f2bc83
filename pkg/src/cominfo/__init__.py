"""Profiles of bipartite graphs: rectangle covers, hypercontractivity bounds,
fixed-distance Hamming graphs and random fixed-density matrices."""

from .model import (
    BipartiteGraph,
    Cover,
    JointDistribution,
    ProfileTriple,
    Rectangle,
    degenerate_check,
    load_distribution,
    load_graph,
)

__all__ = [
    "BipartiteGraph",
    "Cover",
    "JointDistribution",
    "ProfileTriple",
    "Rectangle",
    "degenerate_check",
    "load_distribution",
    "load_graph",
]
