"""Plain-text model files.

Layout::

    VILMAP 1
    a_t=0.702
    ...                      (one ``name=value`` line per parameter)
    next_id=2
    patterns_seen=50
    node <id> <len> <wins>
    <center values>
    <relevance values>
    <distance averages>
    ...
    edges
    <a> <b>

Floats are written with 17 significant digits, so a save/load cycle is exact.
"""
from __future__ import annotations

import io
import os
import tempfile
from dataclasses import fields
from pathlib import Path
from typing import Iterable, List, TextIO, Tuple

import numpy as np

from .core import Node, Params, VilmapError
from .organize import MapState

MAGIC = "VILMAP"
VERSION = 1
COUNTERS = ("next_id", "patterns_seen")


class FormatError(VilmapError, ValueError):
    pass


def fmt_float(v: float) -> str:
    return format(float(v), ".17g")


def fmt_vector(v) -> str:
    return " ".join(fmt_float(x) for x in v)


def node_block(node: Node) -> str:
    return (f"node {node.id} {len(node)} {node.wins}\n{fmt_vector(node.center)}\n"
            f"{fmt_vector(node.relevance)}\n{fmt_vector(node.distance_avg)}\n")


def dumps(state: MapState) -> str:
    out = io.StringIO()
    out.write(f"{MAGIC} {VERSION}\n")
    for f in fields(Params):
        v = getattr(state.params, f.name)
        out.write(f"{f.name}={fmt_float(v) if isinstance(v, float) else v}\n")
    out.write(f"next_id={state.next_id}\npatterns_seen={state.patterns_seen}\n")
    for i in state.ids():
        out.write(node_block(state.node(i)))
    out.write("edges\n")
    for a, b in state.edges():
        out.write(f"{a} {b}\n")
    return out.getvalue()


def _parse_node_blocks(lines: List[str], pos: int, stop: str = "edges") -> Tuple[List[Node], int]:
    nodes = []
    while pos < len(lines) and lines[pos] != stop:
        head = lines[pos].split()
        if len(head) != 4 or head[0] != "node":
            raise FormatError(f"line {pos + 1}: expected 'node <id> <len> <wins>'")
        node_id, length, wins = (int(t) for t in head[1:])
        if pos + 3 >= len(lines):
            raise FormatError(f"line {pos + 1}: truncated node block")
        vecs = []
        for k in range(1, 4):
            vec = np.array([float(t) for t in lines[pos + k].split()])
            if vec.shape[0] != length:
                raise FormatError(f"line {pos + k + 1}: expected {length} values, got {vec.shape[0]}")
            vecs.append(vec)
        nodes.append(Node(node_id, vecs[0], vecs[1], vecs[2], wins))
        pos += 4
    return nodes, pos


def loads(text: str) -> MapState:
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0] != f"{MAGIC} {VERSION}":
        raise FormatError(f"missing '{MAGIC} {VERSION}' header")
    pos = 1
    values, counters = {}, {}
    while pos < len(lines) and "=" in lines[pos]:
        key, value = lines[pos].split("=", 1)
        (counters if key in COUNTERS else values)[key] = value
        pos += 1
    state = MapState(Params.from_dict(values))
    nodes, pos = _parse_node_blocks(lines, pos)
    if pos >= len(lines):
        raise FormatError("missing 'edges' section")
    for node in nodes:
        state.add_node(node, connect_all=False)
    for ln in lines[pos + 1:]:
        if ln:
            a, b = (int(t) for t in ln.split())
            state.connect(a, b)
    state.next_id = int(counters.get("next_id", state.next_id))
    state.patterns_seen = int(counters.get("patterns_seen", 0))
    return state


def atomic_write_text(path, text: str):
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_map(state: MapState, path):
    atomic_write_text(path, dumps(state))


def load_map(path) -> MapState:
    return loads(Path(path).read_text())


def dump_nodes(nodes: Iterable[Node], header: str = "VILMAP-MOTIFS 1") -> str:
    return header + "\n" + "".join(node_block(n) for n in nodes)


def load_nodes(text: str) -> List[Node]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    nodes, _ = _parse_node_blocks(lines, 1, stop="\0")
    return nodes
