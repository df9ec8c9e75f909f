"""End-to-end experiment pipelines and their text reports.

Each pipeline returns a plain result object; the ``*_report`` helpers render
them as delimiter-separated tables with fixed float formatting, so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cluster import ClusterAssignment, Motif, cluster_batch, extract_motifs
from .core import Params
from .data import Corpus, corpus_from_transcript, load_dictionary, load_ucr, ucr_bounds
from .eval import (
    SIZES,
    TABLE1_RANGES,
    TABLE2,
    EvalReport,
    best_index,
    forgetting_datasets,
    forgetting_run,
    median_scores,
    run_all,
    segmentation_datasets,
    segmentation_eval,
    segmentation_params,
)
from .organize import MapState, fit
from .surrogate import child_directed_utterances, read_speech_sentences

PARAM_NAMES = ("a_t", "e_b", "e_n", "beta", "eps_ds", "minwd")


def fmt(v: float) -> str:
    return f"{v:.6f}"


def _table(header: Sequence[str], rows, delimiter: str = "\t") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def range_warnings(params: Params) -> List[str]:
    """Human-readable notes for values outside the sampler's ranges."""
    out = []
    for name in ("a_t", "beta", "e_b", "minwd", "eps_ds"):
        lo, hi = TABLE1_RANGES[name]
        v = getattr(params, name)
        if not lo <= v <= hi:
            out.append(f"{name}={v} lies outside the sampling range [{lo}, {hi}]")
    if params.e_n > params.e_b:
        out.append(f"e_n={params.e_n} exceeds e_b={params.e_b}: neighbors learn faster than the winner")
    return out


def surrogate_corpus(kind: str, n: int, seed: int = 0) -> Corpus:
    gen = {"read": read_speech_sentences, "child": child_directed_utterances}[kind]
    corpus, _ = corpus_from_transcript(gen(n, seed), load_dictionary(), strict=True)
    return corpus


# -- motif discovery on labelled series ------------------------------------------------

def envelope_coverage(prototype: np.ndarray, series: np.ndarray, k: float = 2.0) -> float:
    """Fraction of prototype points inside the per-point ``mean +- k*std`` band of ``series``."""
    series = np.asarray(series, dtype=np.float64)
    n = min(prototype.shape[0], series.shape[1])
    mu, sd = series[:, :n].mean(axis=0), series[:, :n].std(axis=0)
    inside = np.abs(prototype[:n] - mu) <= k * sd
    return float(inside.mean())


@dataclass
class MotifResult:
    state: MapState
    motifs: List[Motif]
    assignments: List[ClusterAssignment]
    test_labels: List[str]
    # per motif: {class label: coverage}
    coverage: List[Dict[str, float]]

    def best_class(self, i: int) -> Tuple[str, float]:
        cov = self.coverage[i]
        label = max(sorted(cov), key=lambda c: cov[c])
        return label, cov[label]


def motif_experiment(train_path, test_path, params: Params, k: float = 2.0) -> MotifResult:
    """One pass over the training series, then cluster the test series and check motifs."""
    bounds = ucr_bounds(train_path, test_path)
    train = load_ucr(train_path, bounds)
    test = load_ucr(test_path, bounds)
    state = fit(train, params)
    motifs = extract_motifs(state)
    labels = [p.label for p in test]
    blocks = {}
    for c in sorted(set(labels)):
        rows = [p.values for p in test if p.label == c]
        n = min(len(r) for r in rows)
        blocks[c] = np.stack([r[:n] for r in rows])
    coverage = [{c: envelope_coverage(m.prototype, b, k) for c, b in blocks.items()}
                for m in motifs]
    return MotifResult(state, motifs, cluster_batch(state, test), labels, coverage)


def motif_report(res: MotifResult) -> str:
    rows = []
    for i, m in enumerate(res.motifs):
        label, cov = res.best_class(i)
        rows.append([m.node_id, len(m.prototype), m.support, label, fmt(cov)])
    return _table(["node_id", "length", "support", "best_class", "coverage"], rows)


# -- forgetting --------------------------------------------------------------------------

@dataclass
class ForgettingResult:
    paramsets: List[Params]
    sizes: Tuple[int, ...]
    a: List[List[EvalReport]]
    b: List[List[EvalReport]]
    counts: Dict[int, Tuple[int, int]]

    def best(self, procedure: str, j: int) -> Tuple[int, EvalReport]:
        runs = self.a if procedure == "A" else self.b
        k = best_index([r[j] for r in runs])
        return k, runs[k][j]

    def median(self, procedure: str, j: int) -> Dict[str, float]:
        runs = self.a if procedure == "A" else self.b
        return median_scores([r[j] for r in runs])


def forgetting_experiment(corpus: Corpus, paramsets: Sequence[Params], sizes=SIZES,
                          seed: int = 0, n_jobs: int = 1) -> ForgettingResult:
    """Procedures A and B for every parameter set over the same per-size test sets."""
    sizes = tuple(sizes)
    datasets = forgetting_datasets(corpus, sizes, seed)
    paramsets = [p.replace(d_min=min(sizes), d_max=max(sizes)) for p in paramsets]
    runs = run_all(paramsets, partial(forgetting_run, datasets=datasets, sizes=sizes), n_jobs)
    counts = {s: (len(d.positives), len(d.negatives)) for s, d in datasets.items()}
    return ForgettingResult(paramsets, sizes, [r[0] for r in runs], [r[1] for r in runs], counts)


def _report_cells(r: EvalReport) -> list:
    return [r.tp, r.fp, r.fn, r.tn, fmt(r.precision), fmt(r.recall), fmt(r.f_measure)]


METRIC_HEADER = ["tp", "fp", "fn", "tn", "precision", "recall", "f_measure"]


def forgetting_runs_table(res: ForgettingResult) -> str:
    rows = []
    for i in range(len(res.paramsets)):
        for proc, runs in (("A", res.a), ("B", res.b)):
            for j, s in enumerate(res.sizes):
                rows.append([i, proc, s] + _report_cells(runs[i][j]))
    return _table(["param_index", "procedure", "size"] + METRIC_HEADER, rows)


def forgetting_series(res: ForgettingResult) -> str:
    """Plot-ready per-size columns: best and median scores of both procedures."""
    header = ["size"]
    for proc in ("A", "B"):
        header += [f"{proc}_best_index", f"{proc}_best_f", f"{proc}_best_precision",
                   f"{proc}_best_recall", f"{proc}_median_f", f"{proc}_median_precision",
                   f"{proc}_median_recall"]
    rows = []
    for j, s in enumerate(res.sizes):
        row = [s]
        for proc in ("A", "B"):
            k, r = res.best(proc, j)
            med = res.median(proc, j)
            row += [k, fmt(r.f_measure), fmt(r.precision), fmt(r.recall),
                    fmt(med["f_measure"]), fmt(med["precision"]), fmt(med["recall"])]
        rows.append(row)
    return _table(header, rows)


# -- word segmentation -----------------------------------------------------------------

@dataclass
class SegmentationResult:
    paramsets: List[Params]
    reports: List[EvalReport]
    counts: Dict[str, int]

    @property
    def best(self) -> Tuple[int, EvalReport]:
        k = best_index(self.reports)
        return k, self.reports[k]


def _segmentation_one(params: Params, data) -> EvalReport:
    return segmentation_eval(None, params, data=data)


def segmentation_experiment(corpus: Corpus, paramsets: Sequence[Params], seed: int = 0,
                            n_jobs: int = 1) -> SegmentationResult:
    data = segmentation_datasets(corpus, seed)
    paramsets = [segmentation_params(p, data) for p in paramsets]
    reports = run_all(paramsets, partial(_segmentation_one, data=data), n_jobs)
    counts = {"train": len(data.train), "positives": len(data.positives),
              "negatives": len(data.negatives), "k_min": data.k_range[0], "k_max": data.k_range[1]}
    return SegmentationResult(paramsets, reports, counts)


def segmentation_runs_table(res: SegmentationResult) -> str:
    rows = [[i] + _report_cells(r) for i, r in enumerate(res.reports)]
    return _table(["param_index"] + METRIC_HEADER, rows)


def segmentation_comparison(res: SegmentationResult) -> str:
    """Best and median rows of this run next to the quoted published rows."""
    _, best = res.best
    med = median_scores(res.reports)
    rows = [["this run (best)", fmt(best.f_measure), fmt(best.precision), fmt(best.recall)],
            ["this run (median)", fmt(med["f_measure"]), fmt(med["precision"]), fmt(med["recall"])]]
    rows += [[f"{name} (published)", fmt(f), fmt(p), fmt(r)] for name, (f, p, r) in TABLE2.items()]
    return _table(["model", "f_measure", "precision", "recall"], rows)


def params_table(paramsets: Sequence[Params]) -> str:
    names = list(Params.__dataclass_fields__)
    rows = [[i] + [repr(getattr(p, n)) for n in names] for i, p in enumerate(paramsets)]
    return _table(["index"] + names, rows)


def parse_params_table(text: str) -> List[Params]:
    rows = list(csv.reader(io.StringIO(text), delimiter="\t"))
    if not rows or rows[0][0] != "index":
        raise ValueError("parameter table needs an 'index' header column")
    header = rows[0][1:]
    return [Params.from_dict(dict(zip(header, row[1:]))) for row in rows[1:] if row]
