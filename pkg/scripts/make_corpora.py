"""Write the generated stand-in corpora used when the original transcripts are unavailable.

Outputs orthographic transcripts and their phonemized form (one utterance per
line, ';' between words) under data/corpora/.
"""
import argparse
from pathlib import Path

from vilmap.data import corpus_from_transcript, load_dictionary, write_corpus
from vilmap.surrogate import child_directed_utterances, read_speech_sentences

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(ROOT / "data" / "corpora"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--read", type=int, default=130, help="read-style sentences")
    ap.add_argument("--child", type=int, default=200, help="child-directed utterances")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pdict = load_dictionary()
    for name, gen, n in (("read", read_speech_sentences, args.read),
                         ("child", child_directed_utterances, args.child)):
        lines = gen(n, args.seed)
        (out / f"{name}_{n}.txt").write_text("\n".join(lines) + "\n")
        corpus, oov = corpus_from_transcript(lines, pdict, strict=True)
        write_corpus(corpus, out / f"{name}_{n}.phon")
        print(f"{name}: {len(corpus)} utterances, {sum(len(u) for u in corpus.utterances)} phonemes")


if __name__ == "__main__":
    main()
