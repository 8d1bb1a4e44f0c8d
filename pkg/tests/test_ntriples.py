"""Test N-Triples parsing and serialization."""
import gzip
import io
import random
import pytest
from rdfinterval.errors import MalformedLineError
from rdfinterval.rdf import (
    ParseStats,
    Term,
    TermKind,
    Triple,
    parse_ntriples,
    parse_term,
    read_ntriples,
    serialize_ntriples,
    write_ntriples,
)


XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"


def parse_text(text, **kwargs):
    return list(parse_ntriples(io.BytesIO(text.encode("utf-8")), **kwargs))


@pytest.mark.parametrize(
    "text,kind,value",
    [
        ("<http://a.example/s>", TermKind.IRI, "http://a.example/s"),
        ("_:b0", TermKind.BLANK_NODE, "_:b0"),
        ('"plain"', TermKind.LITERAL, "plain"),
        ('"tab\\there"', TermKind.LITERAL, "tab\there"),
        ('"\\u0041BC"', TermKind.LITERAL, "ABC"),
    ],
)
def test_parse_term(text, kind, value):
    term = parse_term(text)
    assert term.kind is kind
    assert term.value == value


def test_literal_parts():
    tagged = parse_term('"chat"@fr')
    assert tagged.language == "fr"
    assert tagged.datatype is None
    typed = parse_term('"5"^^<http://www.w3.org/2001/XMLSchema#integer>')
    assert typed.value == "5"
    assert typed.datatype == "http://www.w3.org/2001/XMLSchema#integer"
    assert typed.language is None


def test_literal_identity_is_lexical():
    one = parse_term('"1"^^<http://www.w3.org/2001/XMLSchema#int>')
    padded = parse_term('"01"^^<http://www.w3.org/2001/XMLSchema#int>')
    assert one != padded
    assert parse_term('"\\u0041"') == parse_term('"A"')


def test_parse_statements():
    text = (
        "# a comment\n"
        "\n"
        '<http://a/s> <http://a/p> "x"@en .\n'
        "_:n1 <http://a/p> <http://a/o> . # trailing comment\n"
    )
    stats = ParseStats()
    triples = parse_text(text, stats=stats)
    assert len(triples) == 2
    assert triples[0].o.language == "en"
    assert triples[1].s.kind is TermKind.BLANK_NODE
    assert stats.lines == 4
    assert stats.triples == 2
    assert stats.skipped == 0


@pytest.mark.parametrize(
    "line",
    [
        "<http://a/s> <http://a/p> <http://a/o>",
        '"lit" <http://a/p> <http://a/o> .',
        "<http://a/s> _:p <http://a/o> .",
        "<http://a/s> <http://a/p> .",
        "<http://a/s> <http://a/p> <http://a/o> . extra",
    ],
)
def test_malformed_line_strict(line):
    with pytest.raises(MalformedLineError) as info:
        parse_text(f"<http://a/s> <http://a/p> <http://a/o> .\n{line}\n")
    assert info.value.line_number == 2


def test_malformed_line_lenient():
    text = "garbage\n<http://a/s> <http://a/p> <http://a/o> .\n<broken\n"
    stats = ParseStats()
    triples = parse_text(text, strict=False, stats=stats)
    assert len(triples) == 1
    assert stats.skipped == 2


def test_invalid_utf8_lenient():
    data = b"\xff\xfe <http://a/p> <http://a/o> .\n"
    stats = ParseStats()
    triples = list(parse_ntriples(io.BytesIO(data), strict=False, stats=stats))
    assert triples == []
    assert stats.skipped == 1


def random_triples(count, seed):
    rng = random.Random(seed)
    nodes = [Term.iri(f"http://example.org/n{index}") for index in range(50)]
    nodes += [Term.blank(f"b{index}") for index in range(5)]
    predicates = [
        Term.iri(f"http://example.org/p{index}") for index in range(8)
    ]
    literals = [
        Term.literal('quote " and \\ backslash'),
        Term.literal("line\nbreak"),
        Term.literal("été", language="fr"),
        Term.literal("42", datatype=XSD_INTEGER),
    ]
    triples = []
    for _ in range(count):
        obj = rng.choice(nodes + literals)
        triples.append(Triple(rng.choice(nodes), rng.choice(predicates), obj))
    return triples


def test_round_trip():
    triples = random_triples(1000, seed=11)
    data = serialize_ntriples(triples)
    assert parse_text(data.decode("utf-8")) == triples


def test_read_write_gzip(tmp_path):
    triples = random_triples(100, seed=5)
    path = tmp_path / "data.nt.gz"
    with gzip.open(path, "wb") as handle:
        assert write_ntriples(triples, handle) == 100
    assert list(read_ntriples(path)) == triples


def test_triple_validation():
    with pytest.raises(ValueError):
        Triple(
            Term.literal("x"), Term.iri("http://a/p"), Term.iri("http://a/o")
        )
    with pytest.raises(ValueError):
        Triple(Term.iri("http://a/s"), Term.blank("p"), Term.iri("http://a/o"))
    with pytest.raises(ValueError):
        Term.iri("http://a/with space")
