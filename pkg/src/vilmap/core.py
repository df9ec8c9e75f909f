"""Domain types and the stateless matching math of the variable-length map.

A node compares itself against a pattern in one of three ways depending on
the two lengths:

* ``regular``: equal lengths, fully aligned;
* ``sliding``: node longer than pattern, the pattern is tried at every shift
  and the best activation wins (smallest shift on ties);
* ``truncated``: node shorter than pattern, only the pattern prefix of the
  node's length is compared.

Relevance sums in the activation always range over the compared slice.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels

REGULAR = "regular"
SLIDING = "sliding"
TRUNCATED = "truncated"
MODES = (REGULAR, SLIDING, TRUNCATED)

DEFAULT_EPSILON = 1e-9


class VilmapError(Exception):
    """Base class for errors raised by this package."""


class LengthBoundsError(VilmapError, ValueError):
    """A pattern length falls outside the accepted ``[d_min, d_max]`` range."""


class EmptyMapError(VilmapError, LookupError):
    """An operation needed at least one node."""


def as_vector(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {arr.shape}")
    return arr


@dataclass(eq=False)
class Pattern:
    """A real-valued input of any length, optionally tagged for evaluation."""

    values: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        self.values = as_vector(self.values)
        if self.values.size < 1:
            raise ValueError("a pattern needs at least one value")

    def __len__(self):
        return self.values.shape[0]


@dataclass(eq=False)
class Node:
    """Cluster prototype: center, per-dimension relevance and distance average."""

    id: int
    center: np.ndarray
    relevance: np.ndarray
    distance_avg: np.ndarray
    wins: int = 0

    def __post_init__(self):
        self.center = as_vector(self.center)
        self.relevance = as_vector(self.relevance)
        self.distance_avg = as_vector(self.distance_avg)
        n = self.center.shape[0]
        if n < 1 or self.relevance.shape[0] != n or self.distance_avg.shape[0] != n:
            raise ValueError(
                f"node {self.id}: vector lengths differ or are empty "
                f"({n}, {self.relevance.shape[0]}, {self.distance_avg.shape[0]})"
            )
        if np.any((self.relevance < 0) | (self.relevance > 1)):
            raise ValueError(f"node {self.id}: relevances must lie in [0, 1]")
        if np.any(self.distance_avg < 0):
            raise ValueError(f"node {self.id}: distance averages must be non-negative")

    @classmethod
    def at(cls, node_id: int, values, wins: int = 1) -> "Node":
        """Fresh node centered on ``values`` with unit relevances and zero distances."""
        c = as_vector(values).copy()
        return cls(node_id, c, np.ones_like(c), np.zeros_like(c), wins)

    def __len__(self):
        return self.center.shape[0]

    def copy(self) -> "Node":
        return Node(self.id, self.center.copy(), self.relevance.copy(),
                    self.distance_avg.copy(), self.wins)


@dataclass(frozen=True)
class Params:
    """Hyperparameters of one map.

    ``d_min``/``d_max`` bound accepted pattern lengths. Pruning is off unless
    ``prune_interval`` is positive.
    """

    a_t: float = 0.9
    e_b: float = 0.01
    e_n: float = 0.001
    beta: float = 0.1
    eps_ds: float = 0.05
    n_max: int = 10000
    d_min: int = 1
    d_max: int = 10000
    minwd: float = 0.1
    epsilon: float = DEFAULT_EPSILON
    prune_interval: int = 0
    prune_fraction: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.a_t < 1.0:
            raise ValueError(f"a_t must lie in (0, 1), got {self.a_t}")
        for name in ("e_b", "e_n", "beta", "eps_ds", "minwd", "prune_fraction"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.eps_ds == 0:
            raise ValueError("eps_ds must be positive")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if not 1 <= self.d_min <= self.d_max:
            raise ValueError(f"need 1 <= d_min <= d_max, got {self.d_min}, {self.d_max}")
        if self.prune_interval < 0:
            raise ValueError("prune_interval must be non-negative")

    def replace(self, **changes) -> "Params":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict) -> "Params":
        kinds = {f.name: f.type for f in fields(cls)}
        out = {}
        for key, value in values.items():
            if key not in kinds:
                raise KeyError(f"unknown parameter {key!r}")
            out[key] = int(value) if kinds[key] == "int" else float(value)
        return cls(**out)


@dataclass(frozen=True)
class MatchResult:
    activation: float
    offset: int
    mode: str
    overlap_len: int


def _check_lengths(*vectors):
    n = vectors[0].shape[0]
    if any(v.shape[0] != n for v in vectors[1:]):
        raise ValueError(f"length mismatch: {[v.shape[0] for v in vectors]}")
    if n < 1:
        raise ValueError("vectors must be non-empty")


def weighted_distance(x, c, w) -> float:
    """Relevance-weighted Euclidean distance ``sqrt(sum w_i (x_i - c_i)^2)``."""
    x, c, w = as_vector(x), as_vector(c), as_vector(w)
    _check_lengths(x, c, w)
    s, _ = _kernels.aligned_terms(x, c, w, 0, x.shape[0])
    return float(np.sqrt(s))


def activation(x, c, w, epsilon: float = DEFAULT_EPSILON) -> float:
    """Radial activation ``sum(w) / (sum(w) + D_w(x, c) + epsilon)``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    x, c, w = as_vector(x), as_vector(c), as_vector(w)
    _check_lengths(x, c, w)
    s, sw = _kernels.aligned_terms(x, c, w, 0, x.shape[0])
    return float(_kernels.activation_from_terms(s, sw, epsilon))


def comparison_mode(node_len: int, pattern_len: int) -> str:
    if node_len == pattern_len:
        return REGULAR
    return SLIDING if node_len > pattern_len else TRUNCATED


def match_result(node_len: int, pattern_len: int, act: float, offset: int) -> MatchResult:
    return MatchResult(float(act), int(offset), comparison_mode(node_len, pattern_len),
                       min(node_len, pattern_len))


def best_alignment(node: Node, pattern, epsilon: float = DEFAULT_EPSILON) -> MatchResult:
    x = pattern.values if isinstance(pattern, Pattern) else as_vector(pattern)
    if x.shape[0] < 1:
        raise ValueError("pattern must be non-empty")
    act, off, _ = _kernels.best_offset(x, node.center, node.relevance, epsilon)
    return match_result(len(node), x.shape[0], act, off)


def pick_winner(ids: np.ndarray, acts: np.ndarray) -> int:
    """Index of the highest activation; the lowest id wins ties."""
    top = acts.max()
    tied = np.flatnonzero(acts == top)
    return int(tied[np.argmin(ids[tied])])


def winner(nodes: Sequence[Node], pattern, epsilon: float = DEFAULT_EPSILON):
    """Return ``(node_id, MatchResult)`` for the most active node."""
    nodes = list(nodes)
    if not nodes:
        raise EmptyMapError("cannot pick a winner from an empty node list")
    results = [best_alignment(n, pattern, epsilon) for n in nodes]
    ids = np.array([n.id for n in nodes])
    k = pick_winner(ids, np.array([r.activation for r in results]))
    return nodes[k].id, results[k]


def patterns_from_arrays(rows: Iterable, labels: Optional[Iterable] = None):
    rows = list(rows)
    labels = [None] * len(rows) if labels is None else list(labels)
    return [Pattern(r, lab) for r, lab in zip(rows, labels)]
