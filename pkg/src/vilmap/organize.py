"""Online self-organization: node insertion, growth, adaptation and connections.

Nodes are stored in per-length buckets (one row per node) so that competition
and neighbor adaptation run as compiled loops over contiguous arrays.
Training functions mutate the map in place and return it.
"""
from __future__ import annotations

import hashlib
import logging
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from . import _kernels
from .core import (
    EmptyMapError,
    LengthBoundsError,
    MatchResult,
    Node,
    Params,
    Pattern,
    as_vector,
    match_result,
    pick_winner,
)

log = logging.getLogger(__name__)

GROWTH_RELEVANCE = 0.5


class _Bucket:
    """Rows of equal-length nodes, capacity grows by doubling."""

    def __init__(self, length: int, capacity: int = 8):
        self.length = length
        self.n = 0
        self.ids = np.empty(capacity, dtype=np.int64)
        self.wins = np.empty(capacity, dtype=np.int64)
        self.C = np.empty((capacity, length))
        self.W = np.empty((capacity, length))
        self.D = np.empty((capacity, length))

    def _grow(self):
        cap = 2 * self.ids.shape[0]
        for name in ("ids", "wins", "C", "W", "D"):
            old = getattr(self, name)
            new = np.empty((cap,) + old.shape[1:], dtype=old.dtype)
            new[: self.n] = old[: self.n]
            setattr(self, name, new)

    def append(self, node: Node) -> int:
        if self.n == self.ids.shape[0]:
            self._grow()
        r = self.n
        self.ids[r] = node.id
        self.wins[r] = node.wins
        self.C[r] = node.center
        self.W[r] = node.relevance
        self.D[r] = node.distance_avg
        self.n += 1
        return r

    def remove(self, row: int) -> Optional[int]:
        """Drop ``row`` by moving the last row into it; returns the moved id."""
        last = self.n - 1
        moved = None
        if row != last:
            for arr in (self.ids, self.wins, self.C, self.W, self.D):
                arr[row] = arr[last]
            moved = int(self.ids[row])
        self.n -= 1
        return moved

    def node(self, row: int) -> Node:
        return Node(int(self.ids[row]), self.C[row].copy(), self.W[row].copy(),
                    self.D[row].copy(), int(self.wins[row]))


class MapState:
    """Nodes, their symmetric connection graph, and the training counters."""

    def __init__(self, params: Params):
        self.params = params
        self.next_id = 0
        self.patterns_seen = 0
        self._buckets: Dict[int, _Bucket] = {}
        self._where: Dict[int, Tuple[int, int]] = {}
        self._adj = np.zeros((0, 0), dtype=bool)
        # id-indexed copies of _where for vectorized gathers (-1 = no node)
        self._len_of = np.zeros(0, dtype=np.int64)
        self._row_of = np.zeros(0, dtype=np.int64)

    # -- node access -----------------------------------------------------
    def __len__(self):
        return len(self._where)

    def __contains__(self, node_id):
        return node_id in self._where

    def ids(self) -> List[int]:
        return sorted(self._where)

    def node(self, node_id: int) -> Node:
        length, row = self._where[node_id]
        return self._buckets[length].node(row)

    @property
    def nodes(self) -> Dict[int, Node]:
        """Snapshot of every node keyed by id (copies; edit through the map)."""
        return {i: self.node(i) for i in self.ids()}

    def node_length(self, node_id: int) -> int:
        return self._where[node_id][0]

    def lengths(self) -> List[int]:
        return sorted(self._buckets)

    # -- graph -------------------------------------------------------------
    def _ensure_adj(self, node_id: int):
        size = self._adj.shape[0]
        if node_id < size:
            return
        new_size = max(8, size)
        while new_size <= node_id:
            new_size *= 2
        adj = np.zeros((new_size, new_size), dtype=bool)
        adj[:size, :size] = self._adj
        self._adj = adj
        for name in ("_len_of", "_row_of"):
            arr = np.full(new_size, -1, dtype=np.int64)
            arr[:size] = getattr(self, name)
            setattr(self, name, arr)

    def _place(self, node_id: int, length: int, row: int):
        self._where[node_id] = (length, row)
        self._len_of[node_id] = length
        self._row_of[node_id] = row

    def connect(self, a: int, b: int):
        if a == b:
            raise ValueError("self-edges are not allowed")
        if a not in self._where or b not in self._where:
            raise KeyError(f"unknown node in edge ({a}, {b})")
        self._adj[a, b] = self._adj[b, a] = True

    def disconnect(self, a: int, b: int):
        self._adj[a, b] = self._adj[b, a] = False

    def neighbors(self, node_id: int) -> List[int]:
        return [int(i) for i in np.flatnonzero(self._adj[node_id])]

    def edges(self) -> List[Tuple[int, int]]:
        a, b = np.nonzero(np.triu(self._adj, 1))
        return [(int(i), int(j)) for i, j in zip(a, b)]

    # -- structural edits ----------------------------------------------------
    def add_node(self, node: Node, connect_all: bool = True) -> int:
        if node.id in self._where:
            raise ValueError(f"node id {node.id} already present")
        bucket = self._buckets.get(len(node))
        if bucket is None:
            bucket = self._buckets[len(node)] = _Bucket(len(node))
        row = bucket.append(node)
        self._ensure_adj(node.id)
        self._place(node.id, len(node), row)
        if connect_all:
            others = self._len_of >= 0
            others[node.id] = False
            self._adj[node.id, :] = others
            self._adj[:, node.id] = others
        self.next_id = max(self.next_id, node.id + 1)
        return node.id

    def new_node(self, values) -> int:
        """Insert a fresh node at ``values`` connected to every existing node."""
        return self.add_node(Node.at(self.next_id, values))

    def _detach(self, node_id: int):
        length, row = self._where.pop(node_id)
        self._len_of[node_id] = self._row_of[node_id] = -1
        bucket = self._buckets[length]
        moved = bucket.remove(row)
        if moved is not None:
            self._place(moved, length, row)
        if bucket.n == 0:
            del self._buckets[length]

    def replace_node(self, node: Node):
        """Overwrite a node's vectors (its length may change); edges are kept."""
        length, row = self._where[node.id]
        if len(node) == length:
            b = self._buckets[length]
            b.C[row], b.W[row], b.D[row], b.wins[row] = (
                node.center, node.relevance, node.distance_avg, node.wins)
            return
        self._detach(node.id)
        bucket = self._buckets.get(len(node))
        if bucket is None:
            bucket = self._buckets[len(node)] = _Bucket(len(node))
        self._place(node.id, len(node), bucket.append(node))

    def remove_node(self, node_id: int):
        self._detach(node_id)
        self._adj[node_id, :] = False
        self._adj[:, node_id] = False

    # -- competition -------------------------------------------------------
    def compete(self, x: np.ndarray):
        """Best activation and offset of every node against ``x``.

        Returns ``(ids, lengths, activations, offsets)`` as parallel arrays.
        """
        eps = self.params.epsilon
        ids, lens, acts, offs = [], [], [], []
        for length, b in self._buckets.items():
            a = np.empty(b.n)
            o = np.empty(b.n, dtype=np.int64)
            _kernels.best_offsets_rows(x, b.C, b.W, b.n, eps, a, o)
            ids.append(b.ids[: b.n])
            lens.append(np.full(b.n, length, dtype=np.int64))
            acts.append(a)
            offs.append(o)
        if not ids:
            raise EmptyMapError("the map has no nodes")
        return (np.concatenate(ids), np.concatenate(lens),
                np.concatenate(acts), np.concatenate(offs))

    def best_match(self, x: np.ndarray) -> Tuple[int, MatchResult]:
        """Winner of a full competition, without scoring every node exhaustively.

        Alignments that provably cannot reach the running best are abandoned,
        which leaves the winner, its activation and its offset unchanged.
        """
        if not self._buckets:
            raise EmptyMapError("the map has no nodes")
        eps = self.params.epsilon
        best, best_id, best_off, best_len = -1.0, -1, 0, 0
        # equal-length nodes first: they tend to set a high bar early
        order = sorted(self._buckets, key=lambda L: (L != x.shape[0], L))
        for length in order:
            b = self._buckets[length]
            a, i, o = _kernels.winner_rows(x, b.C, b.W, b.ids, b.n, eps, best, best_id, best_off)
            if i != best_id or a != best:
                best, best_id, best_off, best_len = a, i, o, length
        return int(best_id), match_result(best_len, x.shape[0], best, best_off)

    # -- misc ---------------------------------------------------------------
    def copy(self) -> "MapState":
        other = MapState(self.params)
        other.next_id = self.next_id
        other.patterns_seen = self.patterns_seen
        for i in self.ids():
            other.add_node(self.node(i), connect_all=False)
        other.next_id = self.next_id
        for a, b in self.edges():
            other.connect(a, b)
        return other

    def fingerprint(self) -> str:
        """Digest of all node vectors, edges, counters and params."""
        h = hashlib.sha256()
        h.update(repr(sorted(self.params.to_dict().items())).encode())
        h.update(f"{self.next_id} {self.patterns_seen}".encode())
        for i in self.ids():
            n = self.node(i)
            h.update(f"node {i} {n.wins}".encode())
            for v in (n.center, n.relevance, n.distance_avg):
                h.update(v.tobytes())
        h.update(repr(self.edges()).encode())
        return h.hexdigest()

    def check_invariants(self):
        """Raise AssertionError if any structural invariant is broken."""
        p = self.params
        assert len(self) <= p.n_max, "too many nodes"
        for i in self.ids():
            n = self.node(i)
            assert p.d_min <= len(n) <= p.d_max, f"node {i} length {len(n)} out of bounds"
            assert np.all((n.relevance >= 0) & (n.relevance <= 1)), f"node {i} relevance"
            assert np.all(n.distance_avg >= 0), f"node {i} distance average"
            assert not self._adj[i, i], f"self edge on {i}"
        for a, b in self.edges():
            assert a in self._where and b in self._where, "edge to dead node"
        assert np.array_equal(self._adj, self._adj.T), "asymmetric graph"


def _checked_values(pattern, params: Params) -> np.ndarray:
    x = pattern.values if isinstance(pattern, Pattern) else as_vector(pattern)
    if not params.d_min <= x.shape[0] <= params.d_max:
        raise LengthBoundsError(
            f"pattern length {x.shape[0]} outside [{params.d_min}, {params.d_max}]")
    return x


def init_map(first_pattern, params: Params) -> MapState:
    x = _checked_values(first_pattern, params)
    state = MapState(params)
    state.new_node(x)
    state.patterns_seen = 1
    return state


def grow_node(node: Node, pattern) -> Node:
    """Extend all three vectors of ``node`` to the pattern's length.

    New center entries copy the pattern, new distances start at 0 and new
    relevances at 0.5; the existing prefix is untouched.
    """
    x = pattern.values if isinstance(pattern, Pattern) else as_vector(pattern)
    m, p = len(node), x.shape[0]
    if m >= p:
        raise ValueError(f"node length {m} is not shorter than pattern length {p}")
    tail = p - m
    return Node(
        node.id,
        np.concatenate([node.center, x[m:]]),
        np.concatenate([node.relevance, np.full(tail, GROWTH_RELEVANCE)]),
        np.concatenate([node.distance_avg, np.zeros(tail)]),
        node.wins,
    )


def update_relevances(node: Node, eps_ds: float) -> Node:
    """Recompute relevances from the distance averages (logistic around the mean)."""
    out = node.copy()
    _kernels.relevance_row(out.distance_avg, out.relevance, eps_ds)
    return out


def adapt_node(node: Node, pattern, offset: int, rate: float, beta: float,
               eps_ds: float) -> Node:
    """Move one node toward the pattern on the aligned overlap (δ, then ω, then c)."""
    x = pattern.values if isinstance(pattern, Pattern) else as_vector(pattern)
    out = node.copy()
    _kernels.adapt_row(x, out.center, out.relevance, out.distance_avg, offset, rate, beta, eps_ds)
    return out


def _adapt_ids(state: MapState, ids: np.ndarray, offsets: np.ndarray, x, rate):
    p = state.params
    lens = state._len_of[ids]
    rows = state._row_of[ids]
    for length in np.unique(lens):
        sel = lens == length
        b = state._buckets[int(length)]
        _kernels.adapt_rows(x, b.C, b.W, b.D, rows[sel], offsets[sel], rate, p.beta, p.eps_ds)


def _offsets_by_id(state: MapState, ids, offs) -> np.ndarray:
    out = np.zeros(state._adj.shape[0], dtype=np.int64)
    out[ids] = offs
    return out


def update_winner_and_neighbors(state: MapState, winner_id: int, pattern,
                                match: MatchResult,
                                neighbor_offsets: Optional[np.ndarray] = None) -> MapState:
    """Adapt the winner (rate ``e_b``) and its connected nodes (rate ``e_n``).

    Each neighbor is aligned at its own best offset; ``neighbor_offsets``
    (indexed by node id) may supply those from an earlier competition.
    Positions outside the overlap are left untouched.
    """
    x = pattern.values if isinstance(pattern, Pattern) else as_vector(pattern)
    p = state.params
    if state.node_length(winner_id) < x.shape[0]:
        raise ValueError("grow the winner before adapting it to a longer pattern")
    _adapt_ids(state, np.array([winner_id]), np.array([match.offset]), x, p.e_b)
    nbrs = np.flatnonzero(state._adj[winner_id])
    if nbrs.size and p.e_n > 0:
        if neighbor_offsets is None:
            ids, _, _, offs = state.compete(x)
            neighbor_offsets = _offsets_by_id(state, ids, offs)
        _adapt_ids(state, nbrs, neighbor_offsets[nbrs], x, p.e_n)
    return state


def relevance_similarity(a, b) -> float:
    """``1 - mean |a_i - b_i|`` over the common prefix of two relevance vectors."""
    a, b = as_vector(a), as_vector(b)
    m = min(a.shape[0], b.shape[0])
    return 1.0 - float(np.abs(a[:m] - b[:m]).sum()) / m


def recompute_connections(state: MapState, winner_id: int) -> MapState:
    """Connect the winner to every node whose relevances are similar enough."""
    wl, wr = state._where[winner_id]
    w = state._buckets[wl].W[wr].copy()
    row = np.zeros(state._adj.shape[0], dtype=bool)
    for length, b in state._buckets.items():
        sim = np.empty(b.n)
        _kernels.similarity_rows(b.W, b.n, w, min(wl, length), sim)
        row[b.ids[: b.n][sim > state.params.minwd]] = True
    row[winner_id] = False
    state._adj[winner_id, :] = row
    state._adj[:, winner_id] = row
    return state


def prune(state: MapState) -> List[int]:
    """Remove nodes whose share of wins is below ``prune_fraction`` (keeps at least one)."""
    frac = state.params.prune_fraction
    seen = max(state.patterns_seen, 1)
    doomed = [i for i in state.ids() if state.node(i).wins / seen < frac]
    if len(doomed) == len(state):
        doomed = doomed[1:]
    for i in doomed:
        state.remove_node(i)
    return doomed


def train_step(state: MapState, pattern) -> MapState:
    """Present one pattern: insert a node, adapt the winner, or drop it."""
    p = state.params
    x = _checked_values(pattern, p)
    if len(state) == 0:
        raise EmptyMapError("initialize the map before training")
    state.patterns_seen += 1
    ids, lens, acts, offs = state.compete(x)
    k = pick_winner(ids, acts)
    if acts[k] < p.a_t:
        if len(state) < p.n_max:
            state.new_node(x)
    else:
        wid = int(ids[k])
        match = match_result(int(lens[k]), x.shape[0], acts[k], offs[k])
        node = state.node(wid)
        if len(node) < x.shape[0]:
            node = grow_node(node, x)
            match = match_result(len(node), x.shape[0], match.activation, 0)
        node.wins += 1
        state.replace_node(node)
        update_winner_and_neighbors(state, wid, x, match, _offsets_by_id(state, ids, offs))
        recompute_connections(state, wid)
    if p.prune_interval and state.patterns_seen % p.prune_interval == 0:
        prune(state)
    return state


def train_stream(state: MapState, patterns: Iterable, skip_errors: bool = False) -> MapState:
    """Single online pass over ``patterns`` in order."""
    skipped = 0
    for pattern in patterns:
        try:
            train_step(state, pattern)
        except LengthBoundsError:
            if not skip_errors:
                raise
            skipped += 1
    if skipped:
        log.warning("skipped %d out-of-bounds patterns", skipped)
    return state


def fit(patterns: Iterable, params: Params, skip_errors: bool = False) -> MapState:
    """Initialize on the first acceptable pattern and train on the rest."""
    it = iter(patterns)
    state = None
    for first in it:
        try:
            state = init_map(first, params)
            break
        except LengthBoundsError:
            if not skip_errors:
                raise
    if state is None:
        raise EmptyMapError("no acceptable pattern to initialize the map")
    return train_stream(state, it, skip_errors=skip_errors)
