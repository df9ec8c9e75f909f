"""Recognition metrics, the forgetting procedures, word segmentation and LHS search."""
from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .cluster import assign
from .core import Params, Pattern
from .data import (
    Corpus,
    PhonemeTable,
    Window,
    generate_negatives,
    load_phoneme_table,
    phonemes_to_features,
    window_stream,
)
from .organize import MapState, fit, train_stream

SIZES = (24, 36, 48, 60, 72)

# Parameter ranges; ``e_n_ratio`` scales ``e_b`` so that e_n <= e_b.
TABLE1_RANGES: Dict[str, Tuple[float, float]] = {
    "a_t": (0.70, 0.999),
    "beta": (0.001, 0.5),
    "e_b": (0.0001, 0.01),
    "e_n_ratio": (0.002, 1.0),
    "minwd": (0.001, 0.5),
    "eps_ds": (0.01, 0.1),
}

# Published word-segmentation scores as (F, precision, recall).
TABLE2: Dict[str, Tuple[float, float, float]] = {
    "VILMAP": (0.750, 0.856, 0.667),
    "PUDDLE": (0.706, 0.682, 0.733),
    "DiBS": (0.236, 0.234, 0.240),
    "AGu": (0.782, 0.787, 0.777),
    "TPs": (0.468, 0.432, 0.512),
}

GUNPOINT_PARAMS = Params(a_t=0.702, e_b=0.060, e_n=0.247, beta=0.092, eps_ds=0.070,
                         n_max=10000, minwd=0.223, d_min=1, d_max=150)


def f_measure(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d else 0.0

    @property
    def recall(self) -> float:
        d = self.tp + self.fn
        return self.tp / d if d else 0.0

    @property
    def f_measure(self) -> float:
        return f_measure(self.precision, self.recall)

    def __add__(self, other: "EvalReport") -> "EvalReport":
        return EvalReport(self.tp + other.tp, self.fp + other.fp,
                          self.fn + other.fn, self.tn + other.tn)

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
                "precision": self.precision, "recall": self.recall,
                "f_measure": self.f_measure}


def recognition_eval(state: MapState, positives: Sequence, negatives: Sequence) -> EvalReport:
    """Assigned positives are hits, assigned negatives are false alarms."""
    tp = sum(assign(state, p).assigned for p in positives)
    fp = sum(assign(state, n).assigned for n in negatives)
    return EvalReport(tp, fp, len(positives) - tp, len(negatives) - fp)


# -- forgetting procedures -----------------------------------------------------

@dataclass
class SizeDataset:
    size: int
    train: List[Window]
    negatives: List[Pattern]

    @property
    def positives(self) -> List[Window]:
        return self.train


def forgetting_datasets(corpus: Corpus, sizes: Sequence[int] = SIZES, seed: int = 0,
                        table: Optional[PhonemeTable] = None) -> Dict[int, SizeDataset]:
    """Per input size: every phoneme window of that size, plus as many random non-windows."""
    table = load_phoneme_table() if table is None else table
    corpus.validate(table)
    out = {}
    for size in sizes:
        if size % table.dim:
            raise ValueError(f"size {size} is not a multiple of {table.dim}")
        k = size // table.dim
        train = [w for u in corpus.utterances for w in window_stream(u, k, 1, table)]
        if not train:
            raise ValueError(f"no utterance holds {k} phonemes")
        negs = generate_negatives({w.phonemes for w in train}, corpus.alphabet,
                                  len(train), seed + size)
        out[size] = SizeDataset(size, train,
                                [phonemes_to_features(n, table, " ".join(n)) for n in negs])
    return out


def _datasets(corpus, sizes, seed, datasets):
    if datasets is None:
        datasets = forgetting_datasets(corpus, sizes, seed)
    missing = [s for s in sizes if s not in datasets]
    if missing:
        raise KeyError(f"no dataset for sizes {missing}")
    return datasets


def procedure_a(corpus: Optional[Corpus], params: Params, sizes: Sequence[int] = SIZES,
                seed: int = 0, datasets: Optional[Dict[int, SizeDataset]] = None) -> List[EvalReport]:
    """Fresh map per size: train on that size, then test on it."""
    datasets = _datasets(corpus, sizes, seed, datasets)
    reports = []
    for size in sizes:
        ds = datasets[size]
        state = fit(ds.train, params)
        reports.append(recognition_eval(state, ds.positives, ds.negatives))
    return reports


def procedure_b(corpus: Optional[Corpus], params: Params, sizes: Sequence[int] = SIZES,
                seed: int = 0, datasets: Optional[Dict[int, SizeDataset]] = None) -> List[EvalReport]:
    """One map trained on every size in ascending order, then tested on each."""
    datasets = _datasets(corpus, sizes, seed, datasets)
    order = sorted(sizes)
    state = fit(datasets[order[0]].train, params)
    for size in order[1:]:
        train_stream(state, datasets[size].train)
    return [recognition_eval(state, datasets[s].positives, datasets[s].negatives) for s in sizes]


def forgetting_run(params: Params, datasets: Dict[int, SizeDataset],
                   sizes: Sequence[int] = SIZES) -> Tuple[List[EvalReport], List[EvalReport]]:
    """Both procedures for one parameter set; returns ``(A reports, B reports)``."""
    return (procedure_a(None, params, sizes, datasets=datasets),
            procedure_b(None, params, sizes, datasets=datasets))


# -- word segmentation -------------------------------------------------------------

@dataclass
class SegmentationData:
    train: List[Window]
    positives: List[Pattern]
    negatives: List[Window]
    k_range: Tuple[int, int]


def segmentation_datasets(corpus: Corpus, seed: int = 0, k_range: Optional[Tuple[int, int]] = None,
                          balance: bool = True,
                          table: Optional[PhonemeTable] = None) -> SegmentationData:
    """Displacement windows for training, gold words and boundary chunks for testing.

    Every utterance is scanned position by position; at each position the
    windows of every length in ``k_range`` (phonemes, default: the lexicon's
    word-length range) are presented shortest first. Negatives are windows
    straddling a word boundary whose phonemes are not a word; with
    ``balance`` they are subsampled (seeded, order kept) to the number of
    word tokens.
    """
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    table = load_phoneme_table() if table is None else table
    corpus.validate(table)
    lexicon = corpus.lexicon
    if k_range is None:
        lens = [len(w) for w in lexicon]
        k_range = (min(lens), max(lens))
    kmin, kmax = k_range
    train = []
    for utt in corpus.utterances:
        per_k = {k: window_stream(utt, k, 1, table, lexicon) for k in range(kmin, kmax + 1)}
        for start in range(len(utt)):
            train.extend(per_k[k][start] for k in range(kmin, kmax + 1) if start < len(per_k[k]))
    positives = [phonemes_to_features(w, table, " ".join(w)) for w in corpus.word_tokens()]
    negatives = [w for w in train if w.crosses_boundary and not w.is_word]
    if balance and len(negatives) > len(positives):
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(negatives), len(positives), replace=False))
        negatives = [negatives[i] for i in keep]
    return SegmentationData(train, positives, negatives, (kmin, kmax))


def segmentation_eval(corpus: Optional[Corpus], params: Params, seed: int = 0,
                      data: Optional[SegmentationData] = None) -> EvalReport:
    """Train online on the displacement windows, then score words against chunks."""
    data = segmentation_datasets(corpus, seed) if data is None else data
    state = fit(data.train, params)
    return recognition_eval(state, data.positives, data.negatives)


def segmentation_params(params: Params, data: SegmentationData, dim: int = 12) -> Params:
    """Set the accepted length range to the window lengths of ``data``."""
    return params.replace(d_min=data.k_range[0] * dim, d_max=data.k_range[1] * dim)


# -- parameter sampling --------------------------------------------------------------

@dataclass
class LHSSpec:
    """Latin hypercube over ``ranges``; ``base`` supplies the unsampled fields."""

    n: int = 100
    seed: int = 0
    ranges: Dict[str, Tuple[float, float]] = field(default_factory=lambda: dict(TABLE1_RANGES))
    base: Params = field(default_factory=Params)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one sample")
        for name, (lo, hi) in self.ranges.items():
            if lo > hi:
                raise ValueError(f"range for {name} has lower > upper")


def lhs_unit(n: int, d: int, seed: int) -> np.ndarray:
    """``n`` points in [0, 1)^d, one per equal-width stratum along each axis."""
    return qmc.LatinHypercube(d=d, seed=seed).random(n)


def lhs_sample(spec: LHSSpec) -> List[Params]:
    names = list(spec.ranges)
    unit = lhs_unit(spec.n, len(names), spec.seed)
    lo = np.array([spec.ranges[k][0] for k in names])
    hi = np.array([spec.ranges[k][1] for k in names])
    values = lo + unit * (hi - lo)
    out = []
    for row in values:
        v = dict(zip(names, row.tolist()))
        ratio = v.pop("e_n_ratio", None)
        if ratio is not None:
            v["e_n"] = ratio * v.get("e_b", spec.base.e_b)
        out.append(spec.base.replace(**v))
    return out


def run_all(paramsets: Sequence[Params], experiment: Callable, n_jobs: int = 1) -> list:
    """Apply ``experiment`` to each parameter set, in order (parallel if ``n_jobs`` > 1)."""
    if n_jobs == 1:
        return [experiment(p) for p in paramsets]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(experiment, paramsets))


def best_index(reports: Sequence[EvalReport]) -> int:
    """Highest F-measure; ties go to higher precision, then the earlier index."""
    return min(range(len(reports)),
               key=lambda i: (-reports[i].f_measure, -reports[i].precision, i))


def search_best(paramsets: Sequence[Params], experiment: Callable,
                n_jobs: int = 1) -> Tuple[Params, EvalReport]:
    if not paramsets:
        raise ValueError("no parameter sets to search")
    reports = run_all(paramsets, experiment, n_jobs)
    k = best_index(reports)
    return paramsets[k], reports[k]


def median_scores(reports: Sequence[EvalReport]) -> Dict[str, float]:
    return {
        "precision": statistics.median(r.precision for r in reports),
        "recall": statistics.median(r.recall for r in reports),
        "f_measure": statistics.median(r.f_measure for r in reports),
    }
