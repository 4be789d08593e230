"""Spectral partitioning of weighted uniform hypergraphs."""

from ._core import (
    ConvergenceError,
    DataError,
    Hypergraph,
    HyperpartError,
    InvalidArgument,
    SizeError,
    clustering_error,
    fit_error,
    flatten,
    generate_planted,
    generate_subspaces,
    hosvd_partition,
    load_hypergraph,
    normalized_associativity,
    nhcut_partition,
    sampled_ttm_partition,
    save_hypergraph,
    tetris,
    ttm_partition,
)

__all__ = [
    "ConvergenceError",
    "DataError",
    "Hypergraph",
    "HyperpartError",
    "InvalidArgument",
    "SizeError",
    "clustering_error",
    "fit_error",
    "flatten",
    "generate_planted",
    "generate_subspaces",
    "hosvd_partition",
    "load_hypergraph",
    "normalized_associativity",
    "nhcut_partition",
    "sampled_ttm_partition",
    "save_hypergraph",
    "tetris",
    "ttm_partition",
]
