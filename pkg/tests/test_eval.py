import numpy as np
import pytest

from vilmap.core import Params
from vilmap.data import Corpus
from vilmap.eval import (
    TABLE1_RANGES,
    TABLE2,
    EvalReport,
    LHSSpec,
    best_index,
    f_measure,
    forgetting_datasets,
    lhs_sample,
    median_scores,
    procedure_a,
    procedure_b,
    recognition_eval,
    search_best,
    segmentation_datasets,
    segmentation_eval,
    segmentation_params,
)
from vilmap.organize import MapState


def test_report_examples():
    r = EvalReport(3, 1, 1)
    assert (r.precision, r.recall, r.f_measure) == (0.75, 0.75, 0.75)
    z = EvalReport(0, 4, 2)
    assert (z.precision, z.recall, z.f_measure) == (0.0, 0.0, 0.0)
    assert EvalReport(0, 0, 0).f_measure == 0.0
    with pytest.raises(ValueError):
        EvalReport(-1, 0, 0)


def test_published_row_consistency():
    assert f_measure(0.856, 0.667) == pytest.approx(0.750, abs=1e-3)


def test_recognition_counts():
    state = MapState(Params(a_t=0.95))
    state.new_node([0.2, 0.2])
    pos = [[0.2, 0.2], [0.21, 0.2], [0.9, 0.9]]
    neg = [[0.2, 0.2], [0.0, 1.0]]
    r = recognition_eval(state, pos, neg)
    assert (r.tp, r.fn, r.fp, r.tn) == (2, 1, 1, 1)
    assert recognition_eval(state, [], []).f_measure == 0.0


def test_best_index_tiebreak():
    reps = [EvalReport(2, 2, 0), EvalReport(3, 1, 1), EvalReport(3, 1, 1), EvalReport(1, 0, 3)]
    # 1 and 2 tie on F and precision; the earlier wins
    assert best_index(reps) == 1
    # equal F (2/3 both), higher precision wins
    lo_p, hi_p = EvalReport(2, 2, 0), EvalReport(1, 0, 1)
    assert lo_p.f_measure == hi_p.f_measure
    assert best_index([lo_p, hi_p]) == 1


def test_search_best():
    ps = [Params(a_t=a) for a in (0.7, 0.8, 0.9)]
    best, rep = search_best(ps, lambda p: EvalReport(int(p.a_t * 10), 1, 1))
    assert best.a_t == 0.9 and rep.tp == 9
    with pytest.raises(ValueError):
        search_best([], lambda p: None)


def test_median_scores():
    med = median_scores([EvalReport(1, 0, 0), EvalReport(0, 1, 1), EvalReport(1, 1, 0)])
    assert med["precision"] == 0.5 and med["recall"] == 1.0


# -- LHS ----------------------------------------------------------------------

def test_lhs_single_sample_in_ranges():
    (p,) = lhs_sample(LHSSpec(n=1, seed=3))
    for name in ("a_t", "beta", "e_b", "minwd", "eps_ds"):
        lo, hi = TABLE1_RANGES[name]
        assert lo <= getattr(p, name) <= hi
    assert p.e_n <= p.e_b


def test_lhs_quartiles():
    ps = lhs_sample(LHSSpec(n=4, seed=0, ranges={"a_t": (0.0, 1.0)}))
    # a_t must stay inside (0, 1) for Params, and every quartile is hit once
    assert sorted(int(p.a_t * 4) for p in ps) == [0, 1, 2, 3]


def test_lhs_deterministic():
    assert lhs_sample(LHSSpec(n=10, seed=4)) == lhs_sample(LHSSpec(n=10, seed=4))
    assert lhs_sample(LHSSpec(n=10, seed=4)) != lhs_sample(LHSSpec(n=10, seed=5))


def test_lhs_spec_validation():
    with pytest.raises(ValueError):
        LHSSpec(n=0)
    with pytest.raises(ValueError):
        LHSSpec(ranges={"a_t": (0.9, 0.8)})


# -- procedures -----------------------------------------------------------------

def test_procedures_coincide_on_one_size(tiny_corpus):
    ds = forgetting_datasets(tiny_corpus, sizes=(24,), seed=2)
    p = Params(a_t=0.95, d_min=24, d_max=24)
    assert procedure_a(None, p, (24,), datasets=ds) == procedure_b(None, p, (24,), datasets=ds)


def test_procedures_share_test_sets(tiny_corpus):
    a = forgetting_datasets(tiny_corpus, sizes=(24, 36), seed=2)
    b = forgetting_datasets(tiny_corpus, sizes=(24, 36), seed=2)
    for s in (24, 36):
        assert [n.label for n in a[s].negatives] == [n.label for n in b[s].negatives]
        assert len(a[s].negatives) == len(a[s].train)


def test_procedure_b_runs_cumulatively(tiny_corpus):
    p = Params(a_t=0.95, d_min=24, d_max=36)
    rb = procedure_b(tiny_corpus, p, (24, 36), seed=1)
    assert len(rb) == 2
    for r, s in zip(rb, (24, 36)):
        assert r.tp + r.fn == len(forgetting_datasets(tiny_corpus, (s,), 1)[s].train)


# -- segmentation -----------------------------------------------------------------

def test_segmentation_empty_corpus():
    with pytest.raises(ValueError):
        segmentation_eval(Corpus([]), Params())


def test_segmentation_tiny_corpus_full_recall(tiny_corpus):
    data = segmentation_datasets(tiny_corpus, seed=0)
    assert data.k_range == (2, 3)
    p = segmentation_params(Params(a_t=0.999), data)
    r = segmentation_eval(None, p, data=data)
    assert r.recall == 1.0


def test_segmentation_negatives_are_boundary_chunks(tiny_corpus):
    data = segmentation_datasets(tiny_corpus, seed=0, balance=False)
    lex = tiny_corpus.lexicon
    assert data.negatives and all(w.crosses_boundary and w.phonemes not in lex for w in data.negatives)
    assert len(data.positives) == len(tiny_corpus.word_tokens())
    balanced = segmentation_datasets(tiny_corpus, seed=0)
    assert len(balanced.negatives) == min(len(data.negatives), len(data.positives))


def test_table2_identity():
    for name, (f, p, r) in TABLE2.items():
        assert abs(2 * p * r / (p + r) - f) <= 1e-3, name
