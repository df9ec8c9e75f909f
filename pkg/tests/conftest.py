from pathlib import Path

import pytest

from vilmap import _kernels
from vilmap.data import Corpus, Utterance

ROOT = Path(__file__).resolve().parents[1]
GUNPOINT = ROOT / "data" / "GunPoint"


def pytest_configure(config):
    _kernels.warmup()


@pytest.fixture(scope="session")
def gunpoint_paths():
    train, test = GUNPOINT / "GunPoint_TRAIN.tsv", GUNPOINT / "GunPoint_TEST.tsv"
    if not train.exists():
        pytest.skip("GunPoint not fetched (run scripts/fetch_data.py)")
    return train, test


@pytest.fixture
def tiny_corpus():
    # three words over disjoint phoneme sets
    w1, w2, w3 = ("B", "AA"), ("K", "IY", "T"), ("S", "UW")
    utts = [[w1, w2], [w2, w3], [w3, w1, w2], [w1, w3]]
    return Corpus([Utterance(u) for u in utts])


ACCEPTANCE_LINES = []


def record(criterion: int, ok: bool, detail: str):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
