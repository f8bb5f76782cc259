"""Graph file loading.

Format is chosen by extension: ``.nt`` is N-Triples, ``.ttl`` is the Turtle
subset; a trailing ``.gz`` on either means gzip-compressed input.
"""
from __future__ import annotations

import gzip
from pathlib import Path

from .graph import Graph
from .ntriples import parse_ntriples
from .turtle import parse_turtle_subset


def load_graph(path: str | Path, name: str | None = None) -> Graph:
    p = Path(path)
    suffixes = [s.lower() for s in p.suffixes]
    data = p.read_bytes()
    if suffixes and suffixes[-1] == ".gz":
        data = gzip.decompress(data)
        suffixes = suffixes[:-1]
    fmt = suffixes[-1] if suffixes else ""
    if name is None:
        name = p.name
        for _ in range(2 if fmt and p.suffix.lower() == ".gz" else 1):
            name = name.rsplit(".", 1)[0]
    if fmt == ".ttl":
        return parse_turtle_subset(data, name=name)
    if fmt == ".nt":
        return parse_ntriples(data, name=name)
    raise ValueError(f"cannot infer RDF format from file name: {p.name}")
