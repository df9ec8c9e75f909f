import numpy as np
import pytest

from vilmap.core import VilmapError
from vilmap.data import (
    Corpus,
    OOVError,
    ParseError,
    UnknownSymbolError,
    Utterance,
    corpus_from_transcript,
    generate_negatives,
    load_dictionary,
    load_phoneme_table,
    load_ucr,
    parse_corpus_line,
    parse_dictionary,
    phonemes_to_features,
    read_corpus,
    read_ucr,
    text_to_phonemes,
    ucr_bounds,
    window_stream,
    write_corpus,
)
from vilmap.surrogate import child_directed_utterances, read_speech_sentences


@pytest.fixture(scope="module")
def table():
    return load_phoneme_table()


@pytest.fixture(scope="module")
def cmu():
    return load_dictionary()


# -- UCR -------------------------------------------------------------------------

def test_gunpoint_train_shape(gunpoint_paths):
    train, test = gunpoint_paths
    pats = load_ucr(train, ucr_bounds(train, test))
    assert len(pats) == 50
    assert {len(p) for p in pats} == {150}
    assert len({p.label for p in pats}) == 2
    vals = np.stack([p.values for p in pats])
    assert vals.min() >= 0 and vals.max() <= 1


def test_ucr_empty_file(tmp_path):
    f = tmp_path / "empty.tsv"
    f.write_text("")
    assert load_ucr(f) == []


def test_ucr_bad_token_names_row(tmp_path):
    f = tmp_path / "bad.tsv"
    f.write_text("1\t0.1\t0.2\n2\t0.3\tabc\n")
    with pytest.raises(ParseError, match=r"bad\.tsv:2:"):
        read_ucr(f)


@pytest.mark.parametrize("sep", ["\t", ",", " "])
def test_ucr_delimiters(tmp_path, sep):
    f = tmp_path / "d.txt"
    f.write_text(sep.join(["1", "0", "2"]) + "\n" + sep.join(["2", "4", "2"]) + "\n")
    pats = load_ucr(f)
    np.testing.assert_allclose(pats[0].values, [0.0, 0.5])
    np.testing.assert_allclose(pats[1].values, [1.0, 0.5])
    assert [p.label for p in pats] == ["1", "2"]


# -- pronunciation -----------------------------------------------------------------

def test_dictionary_lookup(cmu):
    assert text_to_phonemes("cat", cmu).phonemes == ["K", "AE", "T"]
    tiny = parse_dictionary(["CAT K AE1 T", "CAT(2) K AA1 T", "# comment"])
    assert tiny == {"cat": ("K", "AE", "T")}


def test_empty_text(cmu):
    assert text_to_phonemes("", cmu).phonemes == []


def test_oov_lenient_and_strict(cmu):
    tr = text_to_phonemes("the zzqxv cat", cmu)
    assert tr.oov == ["zzqxv"] and len(tr.words) == 2
    with pytest.raises(OOVError):
        text_to_phonemes("the zzqxv cat", cmu, strict=True)


def test_surrogates_are_in_vocabulary(cmu):
    for gen in (child_directed_utterances, read_speech_sentences):
        _, oov = corpus_from_transcript(gen(100), cmu)
        assert not oov


# -- features ----------------------------------------------------------------------

def test_feature_sizes(table):
    assert len(phonemes_to_features(["K", "AE"], table)) == 24
    assert len(phonemes_to_features(["K", "AE", "T", "S", "IY", "N"], table)) == 72
    with pytest.raises(ValueError):
        phonemes_to_features([], table)
    with pytest.raises(UnknownSymbolError, match="QQ"):
        phonemes_to_features(["QQ"], table)


def test_feature_table_injective(table):
    vecs = {tuple(table.vector(s)) for s in table.symbols}
    assert len(vecs) == len(table.symbols) == 39


def test_feature_table_covers_dictionary(table, cmu):
    used = {p for phones in cmu.values() for p in phones}
    assert used <= set(table.symbols)


# -- corpus format -------------------------------------------------------------------

def test_corpus_roundtrip(tmp_path):
    corpus = Corpus([parse_corpus_line("DH AH ; K AE T"), parse_corpus_line("HH AY")])
    path = tmp_path / "c.txt"
    write_corpus(corpus, path)
    back = read_corpus(path)
    assert [u.words for u in back.utterances] == [u.words for u in corpus.utterances]
    assert back.lexicon == {("DH", "AH"), ("K", "AE", "T"), ("HH", "AY")}


# -- windows ---------------------------------------------------------------------------

def test_window_counts(table):
    seq = ["K", "AE", "T", "S", "IY"]
    assert len(window_stream(seq, 2, 1, table)) == 4
    assert len(window_stream(seq, 5, 1, table)) == 1
    assert len(window_stream(seq, 6, 1, table)) == 0
    assert len(window_stream(seq, 2, 2, table)) == 2


def test_window_labels(table):
    utt = Utterance([("DH", "AH"), ("K", "AE", "T")])
    wins = {w.phonemes: w for w in window_stream(utt, 2, 1, table)}
    assert wins[("DH", "AH")].is_word and not wins[("DH", "AH")].crosses_boundary
    assert wins[("AH", "K")].crosses_boundary and not wins[("AH", "K")].is_word
    assert not wins[("K", "AE")].is_word and not wins[("K", "AE")].crosses_boundary


# -- negatives -----------------------------------------------------------------------

def test_negatives_basic():
    true = {("A", "B"), ("B", "A")}
    assert generate_negatives(true, ["A", "B", "C"], 0, 1) == []
    negs = generate_negatives(true, ["A", "B", "C"], 50, 1)
    assert len(negs) == 50 and all(n not in true and len(n) == 2 for n in negs)
    assert negs == generate_negatives(true, ["A", "B", "C"], 50, 1)


def test_negatives_unsatisfiable():
    true = {("A", "A"), ("A", "B"), ("B", "A"), ("B", "B")}
    with pytest.raises(VilmapError):
        generate_negatives(true, ["A", "B"], 3, 0, max_tries_per_item=10)
