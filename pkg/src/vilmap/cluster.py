"""Clustering phase: single-winner assignment with rejection, and motif export."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .core import EmptyMapError, Pattern, as_vector
from .organize import MapState
from .serialize import dump_nodes, fmt_float

REJECTED = "-"


@dataclass(frozen=True)
class ClusterAssignment:
    """Outcome for one pattern; ``node_id`` is None when the pattern is rejected.

    Rejected patterns keep the best (losing) activation for diagnostics.
    """

    pattern_index: int
    node_id: Optional[int]
    activation: float
    offset: int
    mode: str

    @property
    def assigned(self) -> bool:
        return self.node_id is not None


@dataclass(frozen=True)
class Motif:
    node_id: int
    prototype: np.ndarray
    relevance: np.ndarray
    support: int


def assign(state: MapState, pattern, index: int = 0) -> ClusterAssignment:
    """Winner of the same competition as training; assigned iff it reaches ``a_t``."""
    if len(state) == 0:
        raise EmptyMapError("cannot cluster with an empty map")
    x = pattern.values if isinstance(pattern, Pattern) else as_vector(pattern)
    node_id, match = state.best_match(x)
    hit = match.activation >= state.params.a_t
    return ClusterAssignment(index, node_id if hit else None, match.activation,
                             match.offset, match.mode)


def cluster_batch(state: MapState, patterns: Sequence) -> List[ClusterAssignment]:
    return [assign(state, p, i) for i, p in enumerate(patterns)]


def extract_motifs(state: MapState) -> List[Motif]:
    """One motif per node, most supported first (ties by node id)."""
    motifs = [Motif(n.id, n.center, n.relevance, n.wins) for n in state.nodes.values()]
    return sorted(motifs, key=lambda m: (-m.support, m.node_id))


def format_assignments(assignments: Sequence[ClusterAssignment], delimiter: str = "\t") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(["index", "node_id", "activation", "offset", "mode"])
    for a in assignments:
        w.writerow([a.pattern_index, REJECTED if a.node_id is None else a.node_id,
                    fmt_float(a.activation), a.offset, a.mode])
    return buf.getvalue()


def parse_assignments(text: str, delimiter: str = "\t") -> List[ClusterAssignment]:
    rows = list(csv.reader(io.StringIO(text), delimiter=delimiter))
    out = []
    for row in rows[1:]:
        if not row:
            continue
        idx, node, act, off, mode = row
        out.append(ClusterAssignment(int(idx), None if node == REJECTED else int(node),
                                     float(act), int(off), mode))
    return out


def format_motifs(state: MapState) -> str:
    """Motifs as full node blocks (model file layout), most supported first."""
    return dump_nodes(state.node(m.node_id) for m in extract_motifs(state))
