"""Turtle subset reader: accepted syntax and explicit refusals."""
import pytest

from rdfval.ntriples import ParseError, parse_ntriples, serialize_ntriples
from rdfval.terms import Iri, Literal, RDF_TYPE
from rdfval.turtle import UnsupportedFeature, parse_turtle_subset


def parse(text, **kw):
    return parse_turtle_subset(text.encode("utf-8"), **kw)


def test_prefixes_and_keyword_a():
    g = parse(
        """
        @prefix ex: <urn:ex:> .
        ex:s a ex:C .
        ex:s ex:p "v" .
        """
    )
    assert len(g) == 2
    assert (
        len(list(g.match(Iri("urn:ex:s"), RDF_TYPE, Iri("urn:ex:C")))) == 1
    )


def test_object_lists_and_predicate_object_lists():
    g = parse(
        """
        @prefix ex: <urn:ex:> .
        ex:s ex:p "a" , "b" ; ex:q ex:o .
        """
    )
    assert len(g) == 3
    assert {t.object for t in g.match(None, Iri("urn:ex:p"), None)} == {
        Literal("a"),
        Literal("b"),
    }


def test_base_resolves_relative_iris():
    g = parse(
        """
        @base <http://b.example/dir/> .
        <s> <p> <../up> .
        """
    )
    (t,) = list(g)
    assert t.subject == Iri("http://b.example/dir/s")
    assert t.object == Iri("http://b.example/up")


def test_property_list_blank_nodes_are_sequentially_named():
    g = parse(
        """
        @prefix ex: <urn:ex:> .
        ex:s ex:p [ ex:q "v" ] .
        _:named ex:p ex:s .
        """
    )
    text = serialize_ntriples(g).decode("utf-8")
    assert "_:b0" in text and "_:b1" in text
    assert "_:named" not in text


def test_language_tags_and_typed_literals():
    g = parse(
        """
        @prefix ex: <urn:ex:> .
        @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
        ex:s ex:p "x"@EN-latn-GB , "5"^^xsd:integer .
        """
    )
    objects = {t.object for t in g}
    assert Literal("x", language="en-latn-gb") in objects


def test_matches_equivalent_ntriples():
    ttl = parse(
        """
        @prefix ex: <urn:ex:> .
        ex:a a ex:C ;
            ex:p ex:b , "lit"@de .
        """
    )
    nt = parse_ntriples(
        b'<urn:ex:a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <urn:ex:C> .\n'
        b'<urn:ex:a> <urn:ex:p> <urn:ex:b> .\n'
        b'<urn:ex:a> <urn:ex:p> "lit"@de .\n'
    )
    assert ttl == nt


def test_out_of_subset_syntax_is_refused_not_garbled():
    cases = [
        "@prefix ex: <urn:ex:> . ex:s ex:p ( 1 2 ) .",
        "@prefix ex: <urn:ex:> . ex:s ex:p 5 .",
        "@prefix ex: <urn:ex:> . ex:s ex:p true .",
        '@prefix ex: <urn:ex:> . ex:s ex:p """long""" .',
        "PREFIX ex: <urn:ex:>\nex:s ex:p ex:o .",
    ]
    for doc in cases:
        with pytest.raises(UnsupportedFeature):
            parse(doc)


def test_unsupported_feature_is_a_parse_error():
    assert issubclass(UnsupportedFeature, ParseError)


def test_plain_syntax_errors():
    for doc in (
        "@prefix ex: <urn:ex:> . ex:s ex:p .",
        "ex:s ex:p ex:o .",
        "@prefix ex: <urn:ex:> . ex:s ex:p ex:o",
    ):
        with pytest.raises(ParseError):
            parse(doc)
