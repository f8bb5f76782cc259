"""Shipped constraint packs and the fixture graphs that exercise them.

Each pack is a catalog JSON document under ``data/``; the fixtures are
small N-Triples graphs with hand-derived expected outcomes recorded under
``data/expected/``.
"""
from __future__ import annotations

import json
from importlib import resources

from .. import catalog as _catalog
from ..catalog import Catalog
from ..graph import Graph
from ..ntriples import parse_ntriples
from ..terms import Iri

__all__ = [
    "FIXTURES",
    "PACKS",
    "PROFILE_CLASSES",
    "load_expected",
    "load_fixture",
    "load_pack",
    "pack_text",
]

PACKS = ("ddi-rdf", "qb", "skos")

# fixture name -> pack it is checked against
FIXTURES = {
    "study-archive": "ddi-rdf",
    "cube-clean": "qb",
    "cube-gaps": "qb",
    "thesaurus": "skos",
}

_DISCO = "http://rdf-vocabulary.ddialliance.org/discovery#"
_QB = "http://purl.org/linked-data/cube#"
_SKOS = "http://www.w3.org/2004/02/skos/core#"

# Classes whose instance counts describe a harvested source at a glance.
PROFILE_CLASSES = {
    "ddi-rdf": (
        Iri(_DISCO + "StudyGroup"),
        Iri(_DISCO + "Study"),
        Iri(_DISCO + "LogicalDataSet"),
        Iri(_DISCO + "Universe"),
    ),
    "qb": (
        Iri(_QB + "DataSet"),
        Iri(_QB + "DataStructureDefinition"),
        Iri(_QB + "Observation"),
        Iri(_QB + "Slice"),
    ),
    "skos": (
        Iri(_SKOS + "ConceptScheme"),
        Iri(_SKOS + "Concept"),
    ),
}


def _data_file(*parts: str):
    node = resources.files(__package__).joinpath("data")
    for part in parts:
        node = node.joinpath(part)
    return node


def pack_text(name: str) -> str:
    """The raw JSON document of a shipped pack."""
    if name not in PACKS:
        raise ValueError(f"unknown pack {name!r}; available: {', '.join(PACKS)}")
    return _data_file(f"{name}.json").read_text(encoding="utf-8")


def load_pack(name: str) -> Catalog:
    return _catalog.load_catalog(pack_text(name))


def load_fixture(name: str) -> Graph:
    if name not in FIXTURES:
        raise ValueError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}"
        )
    data = _data_file("fixtures", f"{name}.nt").read_bytes()
    return parse_ntriples(data, name=name)


def load_expected(name: str) -> dict[str, tuple[str, int]]:
    """Expected (status, violation count) per constraint for a fixture."""
    if name not in FIXTURES:
        raise ValueError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}"
        )
    doc = json.loads(_data_file("expected", f"{name}.json").read_text(encoding="utf-8"))
    return {
        cid: (entry["status"], entry["count"])
        for cid, entry in doc["outcomes"].items()
    }
