"""Self-organizing map with variable-length prototypes, for motif discovery and word segmentation."""
from .cluster import ClusterAssignment, Motif, assign, cluster_batch, extract_motifs
from .core import (
    EmptyMapError,
    LengthBoundsError,
    MatchResult,
    Node,
    Params,
    Pattern,
    VilmapError,
    activation,
    best_alignment,
    weighted_distance,
    winner,
)
from .eval import EvalReport, LHSSpec, lhs_sample, recognition_eval, search_best
from .organize import MapState, fit, init_map, train_step, train_stream
from .serialize import load_map, save_map

__all__ = [
    "ClusterAssignment", "EmptyMapError", "EvalReport", "LHSSpec", "LengthBoundsError",
    "MapState", "MatchResult", "Motif", "Node", "Params", "Pattern", "VilmapError",
    "activation", "assign", "best_alignment", "cluster_batch", "extract_motifs", "fit",
    "init_map", "lhs_sample", "load_map", "recognition_eval", "save_map", "search_best",
    "train_step", "train_stream", "weighted_distance", "winner",
]
