"""Immutable indexed triple store.

Each distinct term is interned once and referenced by a dense integer id.
The three orderings (SPO, POS, OSP) are sorted lists of packed integer
triples, so a lookup with any bound prefix is a pair of bisections. Graphs
are immutable once built; builders are single-writer.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Iterable, Iterator

from .terms import Iri, Literal, Term, Triple

# Packing uses at least 21 bits per position so graphs with up to two million
# distinct terms keep index entries within one machine word.
_MIN_BITS = 21


class Graph:
    """A frozen set of triples with SPO/POS/OSP indexes.

    Build via ``GraphBuilder`` or ``Graph.from_triples``. All query
    operations are read-only and safe to share across threads.
    """

    __slots__ = ("name", "_terms", "_ids", "_bits", "_mask", "_spo", "_pos", "_osp")

    def __init__(
        self,
        terms: list[Term],
        ids: dict[Term, int],
        spo_tuples: list[tuple[int, int, int]],
        name: str | None = None,
    ):
        self.name = name
        self._terms = terms
        self._ids = ids
        bits = max(_MIN_BITS, max(1, len(terms)).bit_length())
        self._bits = bits
        self._mask = (1 << bits) - 1
        two = 2 * bits
        packed = [(s << two) | (p << bits) | o for (s, p, o) in spo_tuples]
        packed.sort()
        spo: list[int] = []
        prev = -1
        for v in packed:
            if v != prev:
                spo.append(v)
                prev = v
        self._spo = spo
        self._pos = sorted((((v >> bits) & self._mask) << two) | ((v & self._mask) << bits) | (v >> two) for v in spo)
        self._osp = sorted(((v & self._mask) << two) | ((v >> two) << bits) | ((v >> bits) & self._mask) for v in spo)

    @classmethod
    def from_triples(cls, triples: Iterable[Triple], name: str | None = None) -> "Graph":
        b = GraphBuilder()
        for t in triples:
            b.add_triple(t)
        return b.freeze(name=name)

    # ---- size and iteration -------------------------------------------------

    def __len__(self) -> int:
        return len(self._spo)

    def __iter__(self) -> Iterator[Triple]:
        bits, mask = self._bits, self._mask
        terms = self._terms
        for v in self._spo:
            yield Triple(terms[v >> (2 * bits)], terms[(v >> bits) & mask], terms[v & mask])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        if len(self) != len(other):
            return False
        return set(self.triples()) == set(other.triples())

    def __hash__(self) -> int:  # pragma: no cover - graphs are not dict keys
        raise TypeError("graphs are unhashable")

    def triples(self) -> list[Triple]:
        return list(self)

    # ---- term interning -----------------------------------------------------

    def term_id(self, term: Term) -> int | None:
        """Dense id of an interned term, or None if absent from the graph."""
        return self._ids.get(term)

    def term(self, term_id: int) -> Term:
        return self._terms[term_id]

    def term_count(self) -> int:
        return len(self._terms)

    # ---- matching -----------------------------------------------------------

    def _range(self, index: list[int], a: int | None, b: int | None, c: int | None) -> range:
        bits = self._bits
        two = 2 * bits
        if a is None:
            return range(0, len(index))
        if b is None:
            lo = a << two
            hi = (a + 1) << two
        elif c is None:
            lo = (a << two) | (b << bits)
            hi = (a << two) | ((b + 1) << bits)
        else:
            lo = (a << two) | (b << bits) | c
            hi = lo + 1
        return range(bisect_left(index, lo), bisect_right(index, hi - 1))

    def match_ids(
        self, s: int | None, p: int | None, o: int | None
    ) -> Iterator[tuple[int, int, int]]:
        """Matching triples as id tuples; index row order (deterministic)."""
        bits, mask = self._bits, self._mask
        two = 2 * bits
        if s is not None:
            if p is not None:
                idx = self._spo
                for i in self._range(idx, s, p, o):
                    v = idx[i]
                    yield (v >> two, (v >> bits) & mask, v & mask)
            elif o is not None:
                idx = self._osp
                for i in self._range(idx, o, s, None):
                    v = idx[i]
                    yield ((v >> bits) & mask, v & mask, v >> two)
            else:
                idx = self._spo
                for i in self._range(idx, s, None, None):
                    v = idx[i]
                    yield (v >> two, (v >> bits) & mask, v & mask)
        elif p is not None:
            idx = self._pos
            for i in self._range(idx, p, o, None):
                v = idx[i]
                yield (v & mask, v >> two, (v >> bits) & mask)
        elif o is not None:
            idx = self._osp
            for i in self._range(idx, o, None, None):
                v = idx[i]
                yield ((v >> bits) & mask, v & mask, v >> two)
        else:
            idx = self._spo
            for v in idx:
                yield (v >> two, (v >> bits) & mask, v & mask)

    def match(
        self,
        s: Term | None = None,
        p: Term | None = None,
        o: Term | None = None,
    ) -> Iterator[Triple]:
        """Triples agreeing with every bound position.

        The index with the longest bound prefix serves the scan, so output
        order is deterministic for a given pattern shape.
        """
        si = pi = oi = None
        if s is not None:
            si = self._ids.get(s)
            if si is None:
                return
        if p is not None:
            pi = self._ids.get(p)
            if pi is None:
                return
        if o is not None:
            oi = self._ids.get(o)
            if oi is None:
                return
        terms = self._terms
        for a, b, c in self.match_ids(si, pi, oi):
            yield Triple(terms[a], terms[b], terms[c])

    def count(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> int:
        """Number of matching triples, without materializing them."""
        si = pi = oi = None
        if s is not None:
            si = self._ids.get(s)
            if si is None:
                return 0
        if p is not None:
            pi = self._ids.get(p)
            if pi is None:
                return 0
        if o is not None:
            oi = self._ids.get(o)
            if oi is None:
                return 0
        return self.count_ids(si, pi, oi)

    def count_ids(self, s: int | None, p: int | None, o: int | None) -> int:
        if s is not None:
            if p is not None:
                return len(self._range(self._spo, s, p, o))
            if o is not None:
                return len(self._range(self._osp, o, s, None))
            return len(self._range(self._spo, s, None, None))
        if p is not None:
            return len(self._range(self._pos, p, o, None))
        if o is not None:
            return len(self._range(self._osp, o, None, None))
        return len(self._spo)

    def contains(self, s: Term, p: Term, o: Term) -> bool:
        return self.count(s, p, o) > 0


class GraphBuilder:
    """Accumulates triples, then freezes them into a Graph.

    Construction is single-writer; the frozen result is shareable.
    """

    __slots__ = ("_terms", "_ids", "_tuples", "_frozen")

    def __init__(self) -> None:
        self._terms: list[Term] = []
        self._ids: dict[Term, int] = {}
        self._tuples: list[tuple[int, int, int]] = []
        self._frozen = False

    def _intern(self, term: Term) -> int:
        i = self._ids.get(term)
        if i is None:
            i = len(self._terms)
            self._ids[term] = i
            self._terms.append(term)
        return i

    def add(self, s: Term, p: Term, o: Term) -> None:
        if self._frozen:
            raise RuntimeError("builder already frozen")
        if isinstance(s, Literal):
            raise ValueError("triple subject cannot be a literal")
        if not isinstance(p, Iri):
            raise ValueError("triple predicate must be an IRI")
        self._tuples.append((self._intern(s), self._intern(p), self._intern(o)))

    def add_triple(self, t: Triple) -> None:
        self.add(t.subject, t.predicate, t.object)

    def __len__(self) -> int:
        return len(self._tuples)

    def freeze(self, name: str | None = None) -> Graph:
        if self._frozen:
            raise RuntimeError("builder already frozen")
        self._frozen = True
        g = Graph(self._terms, self._ids, self._tuples, name=name)
        self._terms = []
        self._ids = {}
        self._tuples = []
        return g
