"""Line-oriented parser and canonical serializer."""
import pytest

from rdfval.ntriples import ParseError, parse_ntriples, serialize_ntriples
from rdfval.terms import BlankNode, Iri, Literal, Triple, XSD_INTEGER


def parse(text):
    return parse_ntriples(text.encode("utf-8"))


def test_basic_forms():
    g = parse(
        """
        # a comment
        <urn:ex:s> <urn:ex:p> <urn:ex:o> .

        <urn:ex:s> <urn:ex:p> "plain" .
        <urn:ex:s> <urn:ex:p> "tagged"@en-GB .
        <urn:ex:s> <urn:ex:p> "5"^^<http://www.w3.org/2001/XMLSchema#integer> .
        _:b <urn:ex:p> <urn:ex:s> .
        """
    )
    assert len(g) == 5
    objects = {t.object for t in g}
    assert Literal("tagged", language="en-gb") in objects
    assert Literal("5", XSD_INTEGER) in objects


def test_string_escapes():
    g = parse(r'<urn:ex:s> <urn:ex:p> "a\tb\nc\"d\\eA\U0001F642" .')
    (t,) = list(g)
    assert t.object == Literal('a\tb\nc"d\\eA🙂')


def test_escape_validation():
    with pytest.raises(ParseError):
        parse(r'<urn:ex:s> <urn:ex:p> "\U00110000" .')
    with pytest.raises(ParseError):
        parse(r'<urn:ex:s> <urn:ex:p> "\q" .')


def test_errors_carry_line_and_column():
    with pytest.raises(ParseError) as err:
        parse('<urn:ex:s> <urn:ex:p> <urn:ex:o> .\nnot a triple\n')
    assert err.value.line == 2


def test_malformed_lines():
    for line in (
        '<urn:ex:s> <urn:ex:p> .',
        '<urn:ex:s> <urn:ex:p> <urn:ex:o>',
        '"lit" <urn:ex:p> <urn:ex:o> .',
        '<urn:ex:s> _:b <urn:ex:o> .',
        '<urn:ex:s> "p" <urn:ex:o> .',
        '<urn:ex:s> <urn:ex:p> <no space> .',
    ):
        with pytest.raises(ParseError):
            parse(line)


def test_blank_nodes_are_renamed_in_first_seen_order():
    g = parse(
        "_:zz <urn:ex:p> _:aa .\n"
        "_:aa <urn:ex:p> _:zz .\n"
    )
    labels = sorted({n.label for t in g for n in (t.subject, t.object)})
    assert labels == ["b0", "b1"]
    by_subject = {t.subject.label: t.object.label for t in g}
    assert by_subject == {"b0": "b1", "b1": "b0"}


def test_duplicate_lines_collapse():
    g = parse("<urn:ex:s> <urn:ex:p> <urn:ex:o> .\n<urn:ex:s>\t<urn:ex:p>\t<urn:ex:o> .\n")
    assert len(g) == 1


def test_serialize_is_sorted_with_trailing_newline():
    g = parse(
        '<urn:ex:z> <urn:ex:p> "2" .\n'
        '<urn:ex:a> <urn:ex:p> "1" .\n'
    )
    data = serialize_ntriples(g)
    lines = data.decode("utf-8").splitlines()
    assert lines == sorted(lines)
    assert data.endswith(b".\n")


def test_serialize_empty_graph():
    from rdfval.graph import GraphBuilder

    assert serialize_ntriples(GraphBuilder().freeze()) == b""


def test_round_trip_is_idempotent():
    text = (
        '<urn:ex:s> <urn:ex:p> "line\\nbreak" .\n'
        '<urn:ex:s> <urn:ex:p> "tab\\there"@en .\n'
        "_:b0 <urn:ex:p> _:b1 .\n"
    )
    g = parse(text)
    once = serialize_ntriples(g)
    again = serialize_ntriples(parse_ntriples(once))
    assert once == again
