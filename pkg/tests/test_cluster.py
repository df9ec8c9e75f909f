import numpy as np
import pytest

from vilmap.cluster import (
    assign,
    cluster_batch,
    extract_motifs,
    format_assignments,
    parse_assignments,
)
from vilmap.core import EmptyMapError, Node, Params
from vilmap.organize import MapState, fit

import oracles


def _map(a_t=0.9, centers=((0.2, 0.4), (0.9, 0.9, 0.1))):
    state = MapState(Params(a_t=a_t))
    for c in centers:
        state.new_node(c)
    return state


def test_exact_prototype_recall():
    state = _map()
    a = assign(state, [0.9, 0.9, 0.1])
    assert a.node_id == 1 and a.activation == pytest.approx(1.0)


def test_distant_pattern_rejected():
    state = _map(a_t=0.99)
    a = assign(state, [0.0, 0.0, 0.0, 1.0, 1.0])
    assert not a.assigned and a.node_id is None
    assert 0 < a.activation < 0.99


def test_empty_map():
    with pytest.raises(EmptyMapError):
        assign(MapState(Params()), [0.1])
    assert extract_motifs(MapState(Params())) == []
    assert cluster_batch(_map(), []) == []


def test_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(20):
        state = MapState(Params(a_t=0.8))
        nodes = []
        for i, L in enumerate(rng.integers(1, 9, size=6)):
            n = Node(i, rng.random(L), rng.random(L), np.zeros(L))
            state.add_node(n)
            nodes.append((i, list(n.center), list(n.relevance)))
        x = list(rng.random(rng.integers(1, 9)))
        want = oracles.winner(nodes, x)
        best = max(oracles.best_alignment(x, c, w)[0] for _, c, w in nodes)
        a = assign(state, x)
        assert a.node_id == (want if best >= 0.8 else None)


def test_motifs_sorted_by_support():
    state = fit([[0.1, 0.1]] * 3 + [[0.9, 0.9]] * 5, Params(a_t=0.95))
    motifs = extract_motifs(state)
    assert [m.support for m in motifs] == [5, 3]


def test_assignment_table_roundtrip():
    state = _map(a_t=0.95)
    rows = cluster_batch(state, [[0.2, 0.4], [0.0, 1.0, 0.0, 1.0], [0.9, 0.9, 0.1]])
    assert parse_assignments(format_assignments(rows)) == rows
