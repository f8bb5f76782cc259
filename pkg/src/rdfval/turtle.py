"""Turtle subset reader.

Supported: ``@prefix``/``@base`` directives, IRIs and prefixed names, the
``a`` keyword, object lists (``,``), predicate-object lists (``;``),
blank-node property lists (``[ ]``), labeled blank nodes, and string
literals with language tags or datatypes. Everything else in full Turtle
(collections, numeric/boolean shorthand, triple-quoted strings, SPARQL-style
directives, quoted triples) raises UnsupportedFeature rather than parsing
wrongly.
"""
from __future__ import annotations

import re
from urllib.parse import urljoin

from .graph import Graph, GraphBuilder
from .ntriples import ParseError, unescape_string
from .terms import BlankNode, Iri, Literal, RDF_TYPE, Term


class UnsupportedFeature(ParseError):
    """Input uses Turtle syntax outside the supported subset."""

    def __init__(self, line: int, column: int, feature: str):
        super().__init__(line, column, f"unsupported syntax: {feature}")
        self.feature = feature


_TOKEN_RES: list[tuple[str, re.Pattern[str]]] = [
    ("WS", re.compile(r"[ \t\r\n]+")),
    ("COMMENT", re.compile(r"#[^\n]*")),
    ("PREFIX_DIR", re.compile(r"@prefix\b")),
    ("BASE_DIR", re.compile(r"@base\b")),
    ("IRIREF", re.compile(r"<([^\x00-\x20<>\"{}|^`\\]*)>")),
    ("BLANK", re.compile(r"_:([A-Za-z0-9_][A-Za-z0-9_.\-]*)")),
    (
        "STRING",
        re.compile(r'"((?:[^"\\\n\r]|\\.)*)"'),
    ),
    ("LANGTAG", re.compile(r"@[a-zA-Z]{1,8}(?:-[a-zA-Z0-9]{1,8})*")),
    ("DTSEP", re.compile(r"\^\^")),
    (
        "PNAME",
        re.compile(
            r"([A-Za-z][A-Za-z0-9_\-]*)?:"
            r"((?:[A-Za-z0-9_\-]|\.(?=[A-Za-z0-9_\-.]))*)"
        ),
    ),
    ("A", re.compile(r"a(?![A-Za-z0-9_])")),
    ("DOT", re.compile(r"\.")),
    ("SEMI", re.compile(r";")),
    ("COMMA", re.compile(r",")),
    ("LBRACKET", re.compile(r"\[")),
    ("RBRACKET", re.compile(r"\]")),
    ("LPAREN", re.compile(r"\(")),
    ("WORD", re.compile(r"[A-Za-z][A-Za-z0-9_]*")),
]


class _Token:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind: str, value: str, line: int, column: int):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        col = pos - line_start + 1
        if text.startswith('"""', pos) or text.startswith("'''", pos):
            raise UnsupportedFeature(line, col, "triple-quoted string")
        if text.startswith("<<", pos):
            raise UnsupportedFeature(line, col, "quoted triple")
        if ch == "'":
            raise UnsupportedFeature(line, col, "single-quoted string")
        if ch.isdigit() or (ch in "+-" and pos + 1 < n and (text[pos + 1].isdigit() or text[pos + 1] == ".")):
            raise UnsupportedFeature(line, col, "numeric literal shorthand")
        for kind, pattern in _TOKEN_RES:
            m = pattern.match(text, pos)
            if m is None:
                continue
            if kind == "WS":
                chunk = m.group(0)
                newlines = chunk.count("\n")
                if newlines:
                    line += newlines
                    line_start = pos + chunk.rindex("\n") + 1
            elif kind == "COMMENT":
                pass
            elif kind == "WORD":
                word = m.group(0)
                if word.upper() in ("PREFIX", "BASE"):
                    raise UnsupportedFeature(line, col, "SPARQL-style directive")
                if word in ("true", "false"):
                    raise UnsupportedFeature(line, col, "boolean literal shorthand")
                raise ParseError(line, col, f"unexpected word {word!r}")
            elif kind == "LPAREN":
                raise UnsupportedFeature(line, col, "collection")
            else:
                tokens.append(_Token(kind, m.group(0), line, col))
            pos = m.end()
            break
        else:
            raise ParseError(line, col, f"unexpected character {ch!r}")
    tokens.append(_Token("EOF", "", line, n - line_start + 1))
    return tokens


class _TurtleParser:
    def __init__(self, text: str, base: str | None, name: str | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.base = base
        self.prefixes: dict[str, str] = {}
        self.builder = GraphBuilder()
        self.name = name
        self._blank_count = 0
        self._blank_map: dict[str, BlankNode] = {}

    # ---- token helpers ------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(tok.line, tok.column, f"expected {what}")
        return tok

    def _fresh_blank(self) -> BlankNode:
        node = BlankNode(f"b{self._blank_count}")
        self._blank_count += 1
        return node

    def _labeled_blank(self, label: str) -> BlankNode:
        node = self._blank_map.get(label)
        if node is None:
            node = self._fresh_blank()
            self._blank_map[label] = node
        return node

    # ---- IRI handling -------------------------------------------------------

    def _resolve_iri(self, raw: str, tok: _Token) -> Iri:
        if not re.match(r"^[A-Za-z][A-Za-z0-9+.\-]*:", raw):
            if self.base is None:
                raise ParseError(tok.line, tok.column, f"relative IRI without a base: {raw!r}")
            raw = urljoin(self.base, raw)
        try:
            return Iri(raw)
        except ValueError as exc:
            raise ParseError(tok.line, tok.column, str(exc)) from None

    def _expand_pname(self, tok: _Token) -> Iri:
        m = re.match(r"^([A-Za-z][A-Za-z0-9_\-]*)?:(.*)$", tok.value)
        prefix = m.group(1) or ""
        local = m.group(2)
        ns = self.prefixes.get(prefix)
        if ns is None:
            raise ParseError(tok.line, tok.column, f"undeclared prefix {prefix + ':'!r}")
        try:
            return Iri(ns + local)
        except ValueError as exc:
            raise ParseError(tok.line, tok.column, str(exc)) from None

    # ---- grammar ------------------------------------------------------------

    def parse(self) -> Graph:
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                break
            if tok.kind == "PREFIX_DIR":
                self.next()
                pname = self.expect("PNAME", "prefix name")
                if not pname.value.endswith(":") or ":" in pname.value[:-1]:
                    raise ParseError(pname.line, pname.column, "expected prefix declaration")
                iritok = self.expect("IRIREF", "IRI")
                self.expect("DOT", "'.'")
                prefix = pname.value[:-1]
                self.prefixes[prefix] = self._resolve_iri(iritok.value[1:-1], iritok).text
            elif tok.kind == "BASE_DIR":
                self.next()
                iritok = self.expect("IRIREF", "IRI")
                self.expect("DOT", "'.'")
                self.base = self._resolve_iri(iritok.value[1:-1], iritok).text
            else:
                self._triples()
                self.expect("DOT", "'.'")
        return self.builder.freeze(name=self.name)

    def _triples(self) -> None:
        tok = self.peek()
        if tok.kind == "LBRACKET":
            subject = self._blank_property_list()
            # A bare "[ ... ] ." statement is legal; further predicates optional.
            if self.peek().kind != "DOT":
                self._predicate_object_list(subject)
            return
        subject = self._subject()
        self._predicate_object_list(subject)

    def _subject(self) -> Term:
        tok = self.next()
        if tok.kind == "IRIREF":
            return self._resolve_iri(tok.value[1:-1], tok)
        if tok.kind == "PNAME":
            return self._expand_pname(tok)
        if tok.kind == "BLANK":
            return self._labeled_blank(tok.value[2:])
        raise ParseError(tok.line, tok.column, "expected subject")

    def _predicate_object_list(self, subject: Term) -> None:
        while True:
            predicate = self._verb()
            self._object_list(subject, predicate)
            if self.peek().kind == "SEMI":
                # Consume runs of semicolons; a trailing one ends the list.
                while self.peek().kind == "SEMI":
                    self.next()
                nxt = self.peek().kind
                if nxt in ("DOT", "RBRACKET", "EOF"):
                    return
                continue
            return

    def _verb(self) -> Iri:
        tok = self.next()
        if tok.kind == "A":
            return RDF_TYPE
        if tok.kind == "IRIREF":
            return self._resolve_iri(tok.value[1:-1], tok)
        if tok.kind == "PNAME":
            return self._expand_pname(tok)
        raise ParseError(tok.line, tok.column, "expected predicate")

    def _object_list(self, subject: Term, predicate: Iri) -> None:
        while True:
            obj = self._object()
            self.builder.add(subject, predicate, obj)
            if self.peek().kind == "COMMA":
                self.next()
                continue
            return

    def _object(self) -> Term:
        tok = self.peek()
        if tok.kind == "LBRACKET":
            return self._blank_property_list()
        self.next()
        if tok.kind == "IRIREF":
            return self._resolve_iri(tok.value[1:-1], tok)
        if tok.kind == "PNAME":
            return self._expand_pname(tok)
        if tok.kind == "BLANK":
            return self._labeled_blank(tok.value[2:])
        if tok.kind == "STRING":
            return self._literal(tok)
        raise ParseError(tok.line, tok.column, "expected object")

    def _literal(self, tok: _Token) -> Literal:
        raw = tok.value[1:-1]
        lexical = unescape_string(raw, tok.line, tok.column + 1)
        nxt = self.peek()
        if nxt.kind == "LANGTAG":
            self.next()
            return Literal(lexical, language=nxt.value[1:])
        if nxt.kind == "DTSEP":
            self.next()
            dtok = self.next()
            if dtok.kind == "IRIREF":
                return Literal(lexical, datatype=self._resolve_iri(dtok.value[1:-1], dtok))
            if dtok.kind == "PNAME":
                return Literal(lexical, datatype=self._expand_pname(dtok))
            raise ParseError(dtok.line, dtok.column, "expected datatype IRI")
        return Literal(lexical)

    def _blank_property_list(self) -> BlankNode:
        open_tok = self.expect("LBRACKET", "'['")
        node = self._fresh_blank()
        if self.peek().kind == "RBRACKET":
            self.next()
            return node
        self._predicate_object_list(node)
        closing = self.next()
        if closing.kind != "RBRACKET":
            raise ParseError(open_tok.line, open_tok.column, "unclosed '['")
        return node


def parse_turtle_subset(
    data: bytes | str, base: str | None = None, name: str | None = None
) -> Graph:
    """Parse the supported Turtle subset into a frozen Graph."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            bad_line = data[: exc.start].count(b"\n") + 1
            raise ParseError(bad_line, 1, f"input is not UTF-8: {exc.reason}") from None
    else:
        text = data
    return _TurtleParser(text, base, name).parse()
