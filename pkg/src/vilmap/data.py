"""Corpus loading and featurization.

Covers UCR time-series files, pronunciation dictionaries, the 12-feature
phoneme table, phonemized corpora (one utterance per line, phonemes separated
by spaces and words by ``;``), sliding phoneme windows and random non-word
generation.
"""
from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .core import Pattern, VilmapError

Phonemes = Tuple[str, ...]

FEATURE_NAMES = (
    "vocalic", "consonantal", "voiced", "nasal", "strident", "continuant",
    "high", "back", "low", "round", "tense", "coronal",
)
N_FEATURES = len(FEATURE_NAMES)
WORD_SEP = ";"


class ParseError(VilmapError, ValueError):
    pass


class UnknownSymbolError(VilmapError, KeyError):
    pass


class OOVError(VilmapError, KeyError):
    pass


# -- UCR ----------------------------------------------------------------------

def _split_row(line: str) -> List[str]:
    if "\t" in line:
        return [t for t in line.split("\t") if t.strip()]
    if "," in line:
        return line.split(",")
    return line.split()


def read_ucr(path) -> Tuple[np.ndarray, List[str]]:
    """Raw values (one row per series) and labels from a UCR-style file."""
    rows, labels = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            tokens = _split_row(line.strip())
            try:
                nums = [float(t) for t in tokens]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric token ({exc})") from None
            if len(nums) < 2:
                raise ParseError(f"{path}:{lineno}: need a label and at least one value")
            if nums[0] != int(nums[0]):
                raise ParseError(f"{path}:{lineno}: class label {tokens[0]!r} is not an integer")
            if rows and len(nums) - 1 != rows[0].shape[0]:
                raise ParseError(f"{path}:{lineno}: expected {rows[0].shape[0]} values, "
                                 f"got {len(nums) - 1}")
            labels.append(str(int(nums[0])))
            rows.append(np.array(nums[1:]))
    if not rows:
        return np.empty((0, 0)), []
    return np.vstack(rows), labels


def ucr_bounds(*paths) -> Tuple[float, float]:
    """Joint (min, max) over every value in the given files."""
    lo, hi = np.inf, -np.inf
    for path in paths:
        values, _ = read_ucr(path)
        if values.size:
            lo, hi = min(lo, values.min()), max(hi, values.max())
    return float(lo), float(hi)


def load_ucr(path, bounds: Optional[Tuple[float, float]] = None) -> List[Pattern]:
    """Load a UCR file as patterns min-max scaled to [0, 1].

    ``bounds`` defaults to the file's own range; pass the joint range of the
    train and test splits to scale both consistently.
    """
    values, labels = read_ucr(path)
    if not labels:
        return []
    lo, hi = bounds if bounds is not None else (values.min(), values.max())
    span = hi - lo
    scaled = (values - lo) / span if span > 0 else np.zeros_like(values)
    return [Pattern(row, lab) for row, lab in zip(scaled, labels)]


# -- pronunciation dictionary ------------------------------------------------

_STRESS = re.compile(r"\d")


def default_dictionary_path() -> Path:
    """The CMU pronouncing dictionary installed with the ``cmudict`` package."""
    return Path(str(resources.files("cmudict") / "data" / "cmudict.dict"))


def parse_dictionary(lines: Iterable[str]) -> Dict[str, Phonemes]:
    """Parse ``WORD PH1 PH2 ...`` lines; first pronunciation wins, stress stripped."""
    out: Dict[str, Phonemes] = {}
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line or line.startswith(";;;"):
            continue
        word, *phones = line.split()
        word = word.lower()
        if word.endswith(")") and "(" in word:
            continue
        if word not in out and phones:
            out[word] = tuple(_STRESS.sub("", p).upper() for p in phones)
    return out


def load_dictionary(path=None) -> Dict[str, Phonemes]:
    path = default_dictionary_path() if path is None else path
    with open(path, encoding="utf-8", errors="replace") as fh:
        return parse_dictionary(fh)


@dataclass
class Transcription:
    words: List[Phonemes]
    oov: List[str]

    @property
    def phonemes(self) -> List[str]:
        return [p for w in self.words for p in w]


_TOKEN = re.compile(r"[a-z']+")


def tokenize(text: str) -> List[str]:
    return [t.strip("'") for t in _TOKEN.findall(text.lower()) if t.strip("'")]


def text_to_phonemes(text: str, pdict: Dict[str, Phonemes], strict: bool = False) -> Transcription:
    """Look up every word of ``text``; unknown words are reported (or raise if strict)."""
    words, oov = [], []
    for tok in tokenize(text):
        phones = pdict.get(tok)
        if phones is None:
            if strict:
                raise OOVError(tok)
            oov.append(tok)
            continue
        words.append(phones)
    return Transcription(words, oov)


# -- phoneme features --------------------------------------------------------

@dataclass
class PhonemeTable:
    vectors: Dict[str, np.ndarray]

    def __post_init__(self):
        for sym, vec in self.vectors.items():
            if vec.shape != (N_FEATURES,):
                raise ValueError(f"phoneme {sym}: expected {N_FEATURES} features")
            if vec.min() < 0 or vec.max() > 1:
                raise ValueError(f"phoneme {sym}: features must lie in [0, 1]")

    @property
    def symbols(self) -> List[str]:
        return sorted(self.vectors)

    @property
    def dim(self) -> int:
        return N_FEATURES

    def __contains__(self, sym):
        return sym in self.vectors

    def vector(self, sym: str) -> np.ndarray:
        try:
            return self.vectors[sym]
        except KeyError:
            raise UnknownSymbolError(f"phoneme {sym!r} not in the feature table") from None


def load_phoneme_table(path=None) -> PhonemeTable:
    """Read ``symbol,f1..f12`` rows; defaults to the bundled articulatory table."""
    if path is None:
        text = (resources.files("vilmap.resources") / "phoneme_features.csv").read_text()
    else:
        text = Path(path).read_text()
    reader = csv.reader(text.splitlines())
    vectors: Dict[str, np.ndarray] = {}
    for lineno, row in enumerate(reader, 1):
        if not row or row[0] == "symbol":
            continue
        if len(row) != N_FEATURES + 1:
            raise ParseError(f"line {lineno}: expected symbol and {N_FEATURES} values")
        if row[0] in vectors:
            raise ParseError(f"line {lineno}: duplicate symbol {row[0]}")
        vectors[row[0]] = np.array([float(v) for v in row[1:]])
    return PhonemeTable(vectors)


def phonemes_to_features(seq: Sequence[str], table: PhonemeTable,
                         label: Optional[str] = None) -> Pattern:
    """Concatenate the feature vectors of ``seq`` (12 values per phoneme)."""
    if len(seq) == 0:
        raise ValueError("cannot featurize an empty phoneme sequence")
    return Pattern(np.concatenate([table.vector(s) for s in seq]), label)


# -- corpora -------------------------------------------------------------------

@dataclass
class Utterance:
    words: List[Phonemes]

    @property
    def phonemes(self) -> List[str]:
        return [p for w in self.words for p in w]

    def word_starts(self) -> List[int]:
        starts, pos = [], 0
        for w in self.words:
            starts.append(pos)
            pos += len(w)
        return starts

    def __len__(self):
        return sum(len(w) for w in self.words)


@dataclass
class Corpus:
    utterances: List[Utterance] = field(default_factory=list)

    @property
    def lexicon(self) -> Set[Phonemes]:
        return {w for u in self.utterances for w in u.words}

    @property
    def alphabet(self) -> List[str]:
        return sorted({p for u in self.utterances for p in u.phonemes})

    def word_tokens(self) -> List[Phonemes]:
        return [w for u in self.utterances for w in u.words]

    def validate(self, table: PhonemeTable):
        missing = [p for p in self.alphabet if p not in table]
        if missing:
            raise UnknownSymbolError(f"phonemes missing from the feature table: {missing}")

    def __len__(self):
        return len(self.utterances)


def parse_corpus_line(line: str) -> Utterance:
    words = [tuple(chunk.split()) for chunk in line.split(WORD_SEP)]
    return Utterance([w for w in words if w])


def read_corpus(path) -> Corpus:
    utts = []
    with open(path) as fh:
        for line in fh:
            if line.strip() and not line.startswith("#"):
                utt = parse_corpus_line(line)
                if utt.words:
                    utts.append(utt)
    return Corpus(utts)


def format_utterance(utt: Utterance) -> str:
    return f" {WORD_SEP} ".join(" ".join(w) for w in utt.words)


def write_corpus(corpus: Corpus, path):
    Path(path).write_text("".join(format_utterance(u) + "\n" for u in corpus.utterances))


def corpus_from_transcript(lines: Iterable[str], pdict: Dict[str, Phonemes],
                           strict: bool = False) -> Tuple[Corpus, Counter]:
    """Phonemize orthographic utterances; returns the corpus and OOV counts."""
    utts, oov = [], Counter()
    for line in lines:
        tr = text_to_phonemes(line, pdict, strict=strict)
        oov.update(tr.oov)
        if tr.words:
            utts.append(Utterance(tr.words))
    return Corpus(utts), oov


# -- windows and negatives -------------------------------------------------------

@dataclass(eq=False)
class Window(Pattern):
    phonemes: Phonemes = ()
    start: int = 0
    crosses_boundary: bool = False
    is_word: bool = False


def window_stream(seq: Union[Utterance, Sequence[str]], k: int, stride: int = 1,
                  table: Optional[PhonemeTable] = None,
                  lexicon: Optional[Set[Phonemes]] = None) -> List[Window]:
    """All ``k``-phoneme windows of one utterance at the given stride, featurized.

    Windows straddling a word boundary are flagged; ``is_word`` checks lexicon
    membership (defaulting to the utterance's own words).
    """
    if k < 1 or stride < 1:
        raise ValueError("k and stride must be at least 1")
    table = load_phoneme_table() if table is None else table
    if isinstance(seq, Utterance):
        phones = seq.phonemes
        starts = set(seq.word_starts())
        lexicon = set(seq.words) if lexicon is None else lexicon
    else:
        phones = list(seq)
        starts = set()
        lexicon = set() if lexicon is None else lexicon
    out = []
    for s in range(0, len(phones) - k + 1, stride):
        chunk = tuple(phones[s:s + k])
        feats = np.concatenate([table.vector(p) for p in chunk])
        crosses = any(s < b < s + k for b in starts)
        out.append(Window(feats, " ".join(chunk), chunk, s, crosses, chunk in lexicon))
    return out


def generate_negatives(true_set: Iterable[Phonemes], alphabet: Sequence[str], n: int,
                       rng_seed: int, max_tries_per_item: int = 1000) -> List[Phonemes]:
    """``n`` random phoneme sequences absent from ``true_set``.

    Lengths follow the empirical length distribution of ``true_set``; phonemes
    are drawn uniformly from ``alphabet``.
    """
    alphabet = sorted(set(alphabet))
    if not alphabet:
        raise ValueError("alphabet must be non-empty")
    if n == 0:
        return []
    true_set = set(map(tuple, true_set))
    if not true_set:
        raise ValueError("need at least one true sequence to match lengths")
    lengths = np.array(sorted(len(t) for t in true_set))
    rng = np.random.default_rng(rng_seed)
    out: List[Phonemes] = []
    tries = 0
    budget = max_tries_per_item * n
    while len(out) < n:
        if tries >= budget:
            raise VilmapError(f"could only draw {len(out)} of {n} negatives; "
                              f"alphabet too small for the true set")
        tries += 1
        m = int(lengths[rng.integers(lengths.shape[0])])
        cand = tuple(alphabet[i] for i in rng.integers(len(alphabet), size=m))
        if cand not in true_set:
            out.append(cand)
    return out
