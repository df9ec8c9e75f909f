"""Deterministic stand-in transcripts for corpora that cannot be redistributed.

``read_speech_sentences`` mimics short read sentences (the TIMIT transcript
role); ``child_directed_utterances`` mimics mother-to-infant speech (the
Brent-Siskind role): short utterances, small vocabulary, heavy repetition.
Both are template grammars over words present in the CMU dictionary, with
Zipf-weighted word choice. They reproduce the protocol, not the published
absolute scores.
"""
import numpy as np

_CDS_LEXICON = {
    "N": "ball doggie kitty baby book cup juice milk shoe hat bear duck truck car "
         "bottle spoon blanket toy bunny cookie apple bird fish horse cow boat "
         "hand nose foot bath bed block box".split(),
    "NAME": "mommy daddy baby grandma".split(),
    "ADJ": "big little nice good pretty soft red blue funny happy".split(),
    "V": "see want like have find get hold throw eat read push kiss".split(),
    "P": "in on under with".split(),
    "GREET": "hi hello bye".split(),
}

_CDS_TEMPLATES = [
    ("look at the {N}", 6),
    ("where is the {N}", 5),
    ("what is that", 4),
    ("that is a {ADJ} {N}", 4),
    ("do you want the {N}", 5),
    ("do you want more {N}", 2),
    ("can you say {N}", 3),
    ("here is your {N}", 4),
    ("you like the {N}", 3),
    ("give {NAME} the {N}", 3),
    ("put the {N} {P} the {N}", 2),
    ("oh what a {ADJ} {N}", 3),
    ("is that a {N}", 4),
    ("good girl", 2),
    ("good boy", 2),
    ("{GREET} {NAME}", 3),
    ("can you {V} the {N}", 3),
    ("it is a {N}", 3),
    ("yes", 3),
    ("no", 2),
    ("all done", 2),
    ("where is {NAME}", 3),
    ("see the {N}", 4),
    ("come here", 2),
    ("you have a {ADJ} {N}", 2),
    ("who is that", 2),
    ("the {N} is {ADJ}", 3),
    ("say {GREET} to the {N}", 2),
    ("let us {V} the {N}", 2),
    ("{V} the {N}", 3),
]

_READ_LEXICON = {
    "DET": "the a this that every one".split(),
    "ADJ": "old young dark small large quiet bright cold warm heavy green brown "
           "early late long short rich simple strong".split(),
    "N": "man woman child dog house garden river city teacher doctor farmer "
         "window letter story train road market friend student water music "
         "morning picture table family winter kitchen office".split(),
    "VT": "found carried painted cleaned watched opened bought followed answered "
          "helped visited moved lifted wrote".split(),
    "VI": "arrived waited smiled laughed rested worked traveled listened".split(),
    "ADV": "quickly slowly quietly carefully today again yesterday often".split(),
    "P": "near behind across under beside into through over".split(),
}

_READ_TEMPLATES = [
    ("{DET} {ADJ} {N} {VT} {DET} {N}", 5),
    ("{DET} {N} {VI} {ADV}", 4),
    ("{DET} {N} {VT} {DET} {ADJ} {N} {P} {DET} {N}", 3),
    ("{DET} {ADJ} {N} {VI} {P} {DET} {N}", 4),
    ("{DET} {N} {ADV} {VT} {DET} {N}", 3),
    ("{DET} {N} and {DET} {N} {VI} {ADV}", 2),
    ("{DET} {N} {VT} {DET} {N} {ADV}", 3),
]


def _zipf_weights(n, s=1.0):
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


def _generate(templates, lexicon, n, seed):
    rng = np.random.default_rng(seed)
    tw = np.array([w for _, w in templates], dtype=float)
    tw /= tw.sum()
    out = []
    for _ in range(n):
        text = templates[rng.choice(len(templates), p=tw)][0]
        words = []
        for tok in text.split():
            if tok.startswith("{"):
                pool = lexicon[tok[1:-1]]
                words.append(pool[rng.choice(len(pool), p=_zipf_weights(len(pool)))])
            else:
                words.append(tok)
        out.append(" ".join(words))
    return out


def child_directed_utterances(n=400, seed=0):
    """Orthographic child-directed utterances, one string each."""
    return _generate(_CDS_TEMPLATES, _CDS_LEXICON, n, seed)


def read_speech_sentences(n=130, seed=0):
    """Orthographic read-style sentences, one string each."""
    return _generate(_READ_TEMPLATES, _READ_LEXICON, n, seed)
