"""Gallai multigraphs: checks, decomposition, construction and enumeration."""

from gallai.errors import (
    BoundsError,
    CliqueViolation,
    ConstructionError,
    GallaiError,
    NotGallaiError,
    SchemaError,
)
from gallai.multigraph import (
    ColoredMultigraph,
    Palette,
    double_edge_cliques,
    is_gallai,
    is_maximal,
    is_reduced,
    maximal_closure,
    rainbow_triangles,
    reduce,
)
from gallai.mixed import MixedGraph, check_tree_property
from gallai.decomposition import decompose, dominates, signature

__all__ = [
    "BoundsError",
    "CliqueViolation",
    "ColoredMultigraph",
    "ConstructionError",
    "GallaiError",
    "MixedGraph",
    "NotGallaiError",
    "Palette",
    "SchemaError",
    "check_tree_property",
    "decompose",
    "dominates",
    "double_edge_cliques",
    "is_gallai",
    "is_maximal",
    "is_reduced",
    "maximal_closure",
    "rainbow_triangles",
    "reduce",
    "signature",
]
