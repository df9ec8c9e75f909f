"""Command-line entry point.

Options can also come from ``key=value`` config files (``--config``); keys are
option names with dashes or underscores, or map parameter names. Explicit
flags override the config file, which overrides the built-in defaults.
Every command writes its outputs atomically and records a ``manifest.json``
holding the parameters, seed and counts needed to rerun it.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path
from typing import Dict, List, Optional

from . import experiments as ex
from .cluster import cluster_batch, format_assignments, format_motifs
from .core import Params, VilmapError
from .data import (
    Corpus,
    corpus_from_transcript,
    load_dictionary,
    load_phoneme_table,
    load_ucr,
    read_corpus,
    window_stream,
)
from .eval import GUNPOINT_PARAMS, SIZES, LHSSpec, lhs_sample
from .organize import fit
from .serialize import atomic_write_text, load_map, save_map

log = logging.getLogger("vilmap")

PARAM_FIELDS = [f.name for f in fields(Params)]


class ConfigError(VilmapError, ValueError):
    pass


def read_config(path) -> Dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _param_overrides(args) -> Dict[str, str]:
    vals = dict(getattr(args, "_config_params", {}))
    for name in PARAM_FIELDS:
        v = getattr(args, f"p_{name}", None)
        if v is not None:
            vals[name] = v
    return vals


def params_from_args(args, base: Params) -> Params:
    over = _param_overrides(args)
    params = Params.from_dict({**base.to_dict(), **over})
    for msg in ex.range_warnings(params):
        log.warning(msg)
    return params


def require_paths(*paths):
    for p in paths:
        if p is not None and not Path(p).exists():
            raise FileNotFoundError(f"no such file: {p}")


def write_manifest(out_dir: Path, manifest: dict):
    atomic_write_text(out_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_corpus(args, kind: str, default_n: int) -> Corpus:
    """Phoneme corpus file, orthographic transcript, or a generated stand-in."""
    if args.corpus:
        require_paths(args.corpus)
        return read_corpus(args.corpus)
    if args.transcript:
        require_paths(args.transcript, args.dictionary)
        pdict = load_dictionary(args.dictionary)
        corpus, oov = corpus_from_transcript(Path(args.transcript).read_text().splitlines(), pdict)
        if oov:
            log.warning("%d out-of-vocabulary tokens skipped (%d types)", sum(oov.values()), len(oov))
        return corpus
    return ex.surrogate_corpus(kind, args.utterances or default_n, args.seed)


def corpus_info(args, corpus: Corpus, kind: str, default_n: int) -> dict:
    source = args.corpus or args.transcript or f"surrogate:{kind}:{args.utterances or default_n}"
    return {"source": str(source), "utterances": len(corpus),
            "phonemes": sum(len(u) for u in corpus.utterances), "words": len(corpus.word_tokens())}


def paramsets_from_args(args, base: Params) -> List[Params]:
    if args.params_file:
        require_paths(args.params_file)
        return ex.parse_params_table(Path(args.params_file).read_text())
    return lhs_sample(LHSSpec(n=args.samples, seed=args.seed, base=base))


# -- commands -----------------------------------------------------------------------

def _training_patterns(args):
    if args.format == "ucr":
        return load_ucr(args.data)
    table = load_phoneme_table(args.phoneme_table)
    corpus = read_corpus(args.data)
    return [w for u in corpus.utterances for w in window_stream(u, args.window, 1, table)]


def cmd_train(args) -> int:
    require_paths(args.data, args.phoneme_table)
    params = params_from_args(args, Params())
    patterns = _training_patterns(args)
    state = fit(patterns, params, skip_errors=args.skip_out_of_bounds)
    out = Path(args.out)
    save_map(state, out / "model.txt")
    write_manifest(out, {"command": "train", "data": str(args.data), "format": args.format,
                         "window": args.window, "seed": args.seed, "params": params.to_dict(),
                         "patterns": len(patterns), "nodes": len(state)})
    print(f"trained {len(state)} nodes on {len(patterns)} patterns -> {out / 'model.txt'}")
    return 0


def cmd_cluster(args) -> int:
    require_paths(args.model, args.data, args.phoneme_table)
    state = load_map(args.model)
    patterns = _training_patterns(args)
    assignments = cluster_batch(state, patterns)
    out = Path(args.out)
    atomic_write_text(out / "assignments.tsv", format_assignments(assignments))
    atomic_write_text(out / "motifs.txt", format_motifs(state))
    n_hit = sum(a.assigned for a in assignments)
    write_manifest(out, {"command": "cluster", "model": str(args.model), "data": str(args.data),
                         "seed": args.seed, "patterns": len(patterns), "assigned": n_hit})
    print(f"assigned {n_hit}/{len(patterns)} patterns")
    return 0


def cmd_motifs(args) -> int:
    require_paths(args.model)
    state = load_map(args.model)
    atomic_write_text(Path(args.out), format_motifs(state))
    print(f"wrote {len(state)} motifs -> {args.out}")
    return 0


def cmd_sample_params(args) -> int:
    base = params_from_args(args, Params())
    paramsets = lhs_sample(LHSSpec(n=args.samples, seed=args.seed, base=base))
    atomic_write_text(Path(args.out), ex.params_table(paramsets))
    print(f"wrote {len(paramsets)} parameter sets -> {args.out}")
    return 0


def exp_gunpoint(args) -> int:
    require_paths(args.train, args.test)
    params = params_from_args(args, GUNPOINT_PARAMS)
    res = ex.motif_experiment(args.train, args.test, params)
    out = Path(args.out)
    save_map(res.state, out / "model.txt")
    atomic_write_text(out / "motifs.txt", format_motifs(res.state))
    atomic_write_text(out / "motif_coverage.tsv", ex.motif_report(res))
    atomic_write_text(out / "assignments.tsv", format_assignments(res.assignments))
    write_manifest(out, {"command": "experiment gunpoint", "train": str(args.train),
                         "test": str(args.test), "seed": args.seed, "params": params.to_dict(),
                         "nodes": len(res.state), "test_patterns": len(res.assignments)})
    print(f"{len(res.state)} nodes")
    print(ex.motif_report(res), end="")
    return 0


def exp_forgetting(args) -> int:
    corpus = load_corpus(args, "read", 130)
    base = params_from_args(args, Params())
    paramsets = paramsets_from_args(args, base)
    sizes = tuple(args.sizes)
    res = ex.forgetting_experiment(corpus, paramsets, sizes, args.seed, args.jobs)
    out = Path(args.out)
    atomic_write_text(out / "runs.tsv", ex.forgetting_runs_table(res))
    atomic_write_text(out / "series.tsv", ex.forgetting_series(res))
    atomic_write_text(out / "params.tsv", ex.params_table(res.paramsets))
    write_manifest(out, {"command": "experiment forgetting", "seed": args.seed,
                         "corpus": corpus_info(args, corpus, "read", 130),
                         "sizes": list(sizes), "samples": len(paramsets),
                         "params_file": args.params_file,
                         "counts": {str(s): list(c) for s, c in res.counts.items()}})
    print(ex.forgetting_series(res), end="")
    return 0


def exp_segmentation(args) -> int:
    corpus = load_corpus(args, "child", 200)
    base = params_from_args(args, Params())
    paramsets = paramsets_from_args(args, base)
    res = ex.segmentation_experiment(corpus, paramsets, args.seed, args.jobs)
    out = Path(args.out)
    atomic_write_text(out / "runs.tsv", ex.segmentation_runs_table(res))
    atomic_write_text(out / "comparison.tsv", ex.segmentation_comparison(res))
    atomic_write_text(out / "params.tsv", ex.params_table(res.paramsets))
    write_manifest(out, {"command": "experiment segmentation", "seed": args.seed,
                         "corpus": corpus_info(args, corpus, "child", 200),
                         "samples": len(paramsets), "params_file": args.params_file,
                         "counts": res.counts, "best_index": res.best[0]})
    print(ex.segmentation_comparison(res), end="")
    return 0


# -- parser ---------------------------------------------------------------------------

def _add_param_flags(p, base: Params = Params(), sampled: bool = False):
    title = "map parameters (override config and defaults)"
    if sampled:
        title += "; sampled fields are drawn by LHS, the rest apply to every set"
    g = p.add_argument_group(title)
    for name in PARAM_FIELDS:
        g.add_argument(f"--{name.replace('_', '-')}", dest=f"p_{name}", metavar="V", default=None,
                       help=f"default: {getattr(base, name)}")


def _add_common(p, out_default: Optional[str] = None):
    p.add_argument("--config", help="key=value file with option and parameter defaults")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    p.add_argument("--out", default=out_default, required=out_default is None,
                   help="output directory (or file for motifs/sample-params)")


def _add_stream(p):
    p.add_argument("--data", required=True, help="UCR file or phoneme corpus file")
    p.add_argument("--format", choices=("ucr", "corpus"), default="ucr", help="input format (default: ucr)")
    p.add_argument("--window", type=int, default=2, help="phonemes per window for corpus input (default: 2)")
    p.add_argument("--phoneme-table", default=None, help="phoneme feature CSV (default: bundled table)")


def _add_search(p, default_n: int):
    p.add_argument("--corpus", help="phoneme corpus file (one utterance per line, ';' between words)")
    p.add_argument("--transcript", help="orthographic transcript, one utterance per line")
    p.add_argument("--dictionary", help="pronunciation dictionary (default: bundled CMU dictionary)")
    p.add_argument("--utterances", type=int, default=None,
                   help=f"size of the generated stand-in corpus (default: {default_n})")
    p.add_argument("--samples", type=int, default=100, help="LHS parameter sets (default: 100)")
    p.add_argument("--params-file", help="parameter table from sample-params instead of sampling")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vilmap",
        description="Variable-length self-organizing map: training, clustering and experiments.",
        epilog="Options may also be given in a key=value file via --config.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a map on one pass over a data file")
    _add_common(p)
    _add_stream(p)
    p.add_argument("--skip-out-of-bounds", action="store_true",
                   help="drop patterns outside [d_min, d_max] instead of failing")
    _add_param_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cluster", help="assign patterns to the nodes of a saved map")
    _add_common(p)
    _add_stream(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("motifs", help="export the node prototypes of a saved map")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_motifs)

    p = sub.add_parser("sample-params", help="write a Latin hypercube table of parameter sets")
    _add_common(p)
    p.add_argument("--samples", type=int, default=100, help="number of sets (default: 100)")
    _add_param_flags(p, sampled=True)
    p.set_defaults(func=cmd_sample_params)

    p = sub.add_parser("experiment", help="run a full experiment pipeline")
    exp = p.add_subparsers(dest="experiment", required=True)
    q = exp.add_parser("gunpoint", help="motif discovery on a labelled UCR train/test split "
                                        "(parameters default to a_t=0.702 e_b=0.060 e_n=0.247 "
                                        "beta=0.092 eps_ds=0.070 n_max=10000 minwd=0.223)")
    _add_common(q)
    q.add_argument("--train", default="data/GunPoint/GunPoint_TRAIN.tsv",
                   help="UCR training split (default: %(default)s)")
    q.add_argument("--test", default="data/GunPoint/GunPoint_TEST.tsv",
                   help="UCR test split (default: %(default)s)")
    _add_param_flags(q, GUNPOINT_PARAMS)
    q.set_defaults(func=exp_gunpoint)
    q = exp.add_parser("forgetting", help="procedures A and B over input sizes, LHS search")
    _add_common(q)
    _add_search(q, 130)
    q.add_argument("--sizes", type=int, nargs="+", default=list(SIZES),
                   help="input sizes in dimensions, multiples of 12 (default: 24 36 48 60 72)")
    _add_param_flags(q, sampled=True)
    q.set_defaults(func=exp_forgetting)
    q = exp.add_parser("segmentation", help="word recognition from phoneme windows, LHS search")
    _add_common(q)
    _add_search(q, 200)
    _add_param_flags(q, sampled=True)
    q.set_defaults(func=exp_segmentation)
    return parser


def _leaf_parser(parser, argv):
    """The subparser that will handle ``argv`` (for applying config defaults)."""
    node = parser
    for tok in argv:
        subs = [a for a in node._actions if isinstance(a, argparse._SubParsersAction)]
        if subs and tok in subs[0].choices:
            node = subs[0].choices[tok]
    return node


def parse_args(argv: Optional[List[str]] = None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    config_params = {}
    if known.config:
        require_paths(known.config)
        leaf = _leaf_parser(parser, argv)
        dests = {a.dest for a in leaf._actions}
        defaults = {}
        for key, value in read_config(known.config).items():
            if key in PARAM_FIELDS:
                config_params[key] = value
            elif key in dests:
                action = next(a for a in leaf._actions if a.dest == key)
                if action.nargs in ("+", "*"):
                    value = [action.type(v) if action.type else v for v in value.split()]
                elif action.type:
                    value = action.type(value)
                defaults[key] = value
                action.required = False
            else:
                raise ConfigError(f"{known.config}: unknown key {key!r}")
        leaf.set_defaults(**defaults)
    args = parser.parse_args(argv)
    args._config_params = config_params
    return args


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = parse_args(argv)
        if args.verbose:
            log.setLevel(logging.INFO)
        return args.func(args)
    except (VilmapError, FileNotFoundError, ValueError, KeyError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
