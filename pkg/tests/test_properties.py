"""Property tests for the invariants of every module."""
import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vilmap.cluster import assign
from vilmap.core import Node, Params, activation, pick_winner, best_alignment, weighted_distance
from vilmap.data import load_phoneme_table, window_stream
from vilmap.eval import EvalReport, LHSSpec, lhs_sample, lhs_unit, recognition_eval
from vilmap.organize import MapState, adapt_node, fit, train_step, init_map

import oracles

unit = st.floats(0.0, 1.0, allow_nan=False)
vec = lambda n: arrays(np.float64, n, elements=unit)  # noqa: E731
lengths = st.integers(1, 12)

SETTINGS = settings(max_examples=60, deadline=None, derandomize=True,
                    suppress_health_check=[HealthCheck.too_slow])


@st.composite
def triples(draw, n=None):
    n = draw(lengths) if n is None else n
    return draw(vec(n)), draw(vec(n)), draw(vec(n))


@st.composite
def streams(draw, max_len=6, max_count=25):
    n = draw(st.integers(1, max_count))
    return [draw(vec(draw(st.integers(1, max_len)))) for _ in range(n)]


@st.composite
def param_sets(draw):
    return Params(a_t=draw(st.floats(0.5, 0.999)), e_b=draw(st.floats(0.0, 1.0)),
                  e_n=draw(st.floats(0.0, 1.0)), beta=draw(st.floats(0.0, 1.0)),
                  eps_ds=draw(st.floats(0.01, 0.2)), minwd=draw(st.floats(0.0, 1.0)),
                  n_max=draw(st.integers(1, 8)))


# -- matching math ------------------------------------------------------------------

@SETTINGS
@given(triples())
def test_activation_range(t):
    x, c, w = t
    if w.sum() > 0:
        assert 0.0 <= activation(x, c, w) < 1.0


@SETTINGS
@given(triples(), st.floats(0.0, 10.0))
def test_distance_symmetry_and_scaling(t, k):
    x, c, w = t
    d = weighted_distance(x, c, w)
    assert weighted_distance(c, x, w) == d
    scaled = weighted_distance(c + k * (x - c), c, w)
    assert np.isclose(scaled, k * d, rtol=1e-9, atol=1e-12)


@SETTINGS
@given(triples(), st.data())
def test_zero_relevance_removes_dimension(t, data):
    x, c, w = t
    i = data.draw(st.integers(0, len(x) - 1))
    w = w.copy()
    w[i] = 0.0
    y = x.copy()
    y[i] = data.draw(st.floats(-5, 5))
    assert weighted_distance(x, c, w) == weighted_distance(y, c, w)
    assert activation(x, c, w) == activation(y, c, w)


@SETTINGS
@given(st.integers(1, 20), st.integers(1, 20), st.data())
def test_alignment_matches_brute_force(n, p, data):
    c, w, x = data.draw(vec(n)), data.draw(vec(n)), data.draw(vec(p))
    res = best_alignment(Node(0, c, w, np.zeros(n)), x)
    want = oracles.best_alignment(list(x), list(c), list(w))
    assert (res.activation, res.offset) == want


# -- training ----------------------------------------------------------------------

@SETTINGS
@given(streams(), param_sets())
def test_training_invariants(patterns, params):
    state = init_map(patterns[0], params)
    count, lens = len(state), {i: state.node_length(i) for i in state.ids()}
    for x in patterns[1:]:
        train_step(state, x)
        state.check_invariants()
        assert count <= len(state) <= params.n_max
        for i, L in lens.items():
            assert state.node_length(i) >= L
        count, lens = len(state), {i: state.node_length(i) for i in state.ids()}


@SETTINGS
@given(streams(), param_sets())
def test_training_deterministic(patterns, params):
    assert fit(patterns, params).fingerprint() == fit(patterns, params).fingerprint()


@SETTINGS
@given(st.integers(1, 10), st.floats(0.001, 1.0), st.data())
def test_center_update_contracts(n, e, data):
    c, x = data.draw(vec(n)), data.draw(vec(n))
    node = Node(0, c, np.ones(n), np.zeros(n))
    out = adapt_node(node, x, 0, e, 0.1, 0.05)
    np.testing.assert_allclose(np.abs(x - out.center), (1 - e) * np.abs(x - c), atol=1e-12)


# -- clustering -------------------------------------------------------------------------

@SETTINGS
@given(streams(max_len=20, max_count=40), param_sets(), vec(st.integers(1, 20)))
def test_pruned_winner_equals_exhaustive(patterns, params, x):
    state = fit(patterns, params.replace(n_max=40))
    ids, lens, acts, offs = state.compete(x)
    k = pick_winner(ids, acts)
    got, m = state.best_match(x)
    assert got == ids[k]
    assert (m.activation, m.offset) == (acts[k], offs[k])
    nodes = [(i, state.node(i).center, state.node(i).relevance) for i in state.ids()]
    assert got == oracles.winner(nodes, x, params.epsilon)


@SETTINGS
@given(streams(), st.floats(0.5, 0.99), vec(st.integers(1, 6)))
def test_assign_does_not_mutate(patterns, a_t, x):
    state = fit(patterns, Params(a_t=a_t))
    before = state.fingerprint()
    assign(state, x)
    assert state.fingerprint() == before


@SETTINGS
@given(streams(), st.floats(0.5, 0.99), st.floats(0.5, 0.99), vec(st.integers(1, 6)))
def test_threshold_semantics_and_monotone_rejection(patterns, a1, a2, x):
    lo, hi = sorted((a1, a2))
    state = fit(patterns, Params(a_t=lo))
    ids, _, acts, _ = state.compete(x)
    res_lo = assign(state, x)
    assert res_lo.assigned == (acts.max() >= lo)
    strict = MapState(Params(a_t=hi))
    for i in state.ids():
        strict.add_node(state.node(i), connect_all=False)
    if not res_lo.assigned:
        assert not assign(strict, x).assigned


# -- data ---------------------------------------------------------------------------------

TABLE = load_phoneme_table()


@SETTINGS
@given(st.lists(st.sampled_from(TABLE.symbols), min_size=0, max_size=15),
       st.integers(1, 6), st.integers(1, 4))
def test_window_counts(seq, k, stride):
    wins = window_stream(seq, k, stride, TABLE)
    want = 0 if len(seq) < k else (len(seq) - k) // stride + 1
    assert len(wins) == want
    for w in wins:
        assert len(w) == 12 * k
        assert w.values.min() >= 0 and w.values.max() <= 1


# -- eval ----------------------------------------------------------------------------------

@SETTINGS
@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_metric_identities(tp, fp, fn, tn):
    r = EvalReport(tp, fp, fn, tn)
    p, rc, f = oracles.f_measure(tp, fp, fn)
    assert (r.precision, r.recall) == (p, rc)
    assert abs(r.f_measure - f) <= 1e-12
    if r.precision + r.recall > 0:
        assert abs(r.f_measure - 2 * r.precision * r.recall / (r.precision + r.recall)) <= 1e-12
    for v in (r.precision, r.recall, r.f_measure):
        assert 0 <= v <= 1


@SETTINGS
@given(streams(max_count=10), st.lists(vec(3), max_size=5), st.lists(vec(3), max_size=5))
def test_recognition_partitions(patterns, pos, neg):
    state = fit(patterns, Params(a_t=0.9))
    r = recognition_eval(state, pos, neg)
    assert r.tp + r.fn == len(pos) and r.fp + r.tn == len(neg)


@SETTINGS
@given(st.integers(1, 200), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_lhs_stratification(n, d, seed):
    u = lhs_unit(n, d, seed)
    for j in range(d):
        assert sorted(np.floor(u[:, j] * n).astype(int)) == list(range(n))


@SETTINGS
@given(st.integers(1, 60), st.integers(0, 1000))
def test_lhs_params_stratified(n, seed):
    spec = LHSSpec(n=n, seed=seed)
    ps = lhs_sample(spec)
    for name in ("a_t", "beta", "e_b", "minwd", "eps_ds"):
        lo, hi = spec.ranges[name]
        cells = sorted(min(int((getattr(p, name) - lo) / (hi - lo) * n), n - 1) for p in ps)
        assert cells == list(range(n))
    assert all(p.e_n <= p.e_b for p in ps)
