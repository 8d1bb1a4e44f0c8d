"""Test the SPARQL subset parser."""
import pytest
from rdfinterval.errors import QuerySyntaxError, UnsupportedFeatureError
from rdfinterval.query import Const, Query, TriplePattern, Var, parse_query
from rdfinterval.rdf import RDF_TYPE, Term
from rdfinterval.testkit import LUBM_QUERIES, UB
from conftest import EX, ex


def const(name) -> Const:
    return Const(ex(name))


def test_select_type_pattern():
    query = parse_query(
        f"PREFIX ex: <{EX}> SELECT ?x WHERE {{ ?x a ex:Professor . }}"
    )
    assert query.projection == ("x",)
    assert not query.distinct
    assert query.branches == (
        (
            TriplePattern(
                Var("x"), Const(Term.iri(RDF_TYPE)), const("Professor")
            ),
        ),
    )
    assert query.branches[0][0].is_type


def test_abbreviations():
    query = parse_query(
        "SELECT * { ?x a Professor ; teaches ?c , ?d . ?c name \"Intro\"@en }",
        base=EX,
    )
    assert query.projection == ("x", "c", "d")
    patterns = query.branches[0]
    assert [str(pattern.p) for pattern in patterns] == [
        f"<{RDF_TYPE}>",
        f"<{EX}teaches>",
        f"<{EX}teaches>",
        f"<{EX}name>",
    ]
    assert patterns[3].o == Const(Term.literal("Intro", language="en"))


def test_union_branches():
    query = parse_query(
        """
        PREFIX ex: <http://example.org/univ#>
        SELECT DISTINCT ?x ?y WHERE {
            { ?x ex:teaches ?y } UNION { ?x ex:takesCourse ?y }
            ?x a ex:Person .
        }
        """
    )
    assert query.distinct
    assert len(query.branches) == 2
    assert [len(branch) for branch in query.branches] == [2, 2]
    assert query.branches[1][0].p == const("takesCourse")


def test_nested_unions_multiply():
    query = parse_query(
        "SELECT ?x { { ?x p1 ?y } UNION { ?x p2 ?y } "
        "{ ?y q1 ?z } UNION { ?y q2 ?z } UNION { ?y q3 ?z } }",
        base=EX,
    )
    assert len(query.branches) == 6


def test_literals_and_numbers():
    query = parse_query(
        "SELECT ?x { ?x <http://e/age> 42 . "
        '?x <http://e/ok> "true"^^xsd:boolean . '
        "?x <http://e/h> 1.5 }"
    )
    objects = [pattern.o.term for pattern in query.branches[0]]
    assert objects[0].n3() == (
        '"42"^^<http://www.w3.org/2001/XMLSchema#integer>'
    )
    assert objects[1].datatype == "http://www.w3.org/2001/XMLSchema#boolean"
    assert objects[2].datatype == "http://www.w3.org/2001/XMLSchema#decimal"


def test_base_declaration():
    query = parse_query(
        "BASE <http://example.org/univ#> SELECT ?x { ?x <teaches> course1 }"
    )
    pattern = query.branches[0][0]
    assert pattern.p == const("teaches")
    assert pattern.o == const("course1")


def test_extra_prefixes():
    query = parse_query(
        "SELECT ?x { ?x a ub:Chair }", prefixes={"ub": UB}
    )
    assert query.branches[0][0].o == Const(Term.iri(UB + "Chair"))


def test_lubm_queries_parse():
    shapes = {name: parse_query(text) for name, text in LUBM_QUERIES.items()}
    sizes = [len(query.branches[0]) for query in shapes.values()]
    assert sizes == [1, 1, 2, 3]
    assert shapes["Q3"].projection == ("x", "y")


def test_to_sparql_reparses():
    query = parse_query(
        "SELECT ?x ?y { { ?x p1 ?y } UNION { ?x p2 ?y . ?y a C } }", base=EX
    )
    assert parse_query(query.to_sparql()) == query


@pytest.mark.parametrize(
    "text",
    [
        "SELECT ?x { ?x a ex:Professor }",
        "SELECT { ?x ?p ?o }",
        "SELECT ?x ?x ?p ?o }",
        "SELECT ?x { ?x ?p ?o ",
        "SELECT ?z { ?x ?p ?o }",
        "SELECT ?x { { ?x ?p ?o } UNION { ?y ?p ?o } }",
        "SELECT ?x { ?x \"p\" ?o }",
        "SELECT ?x { \"s\" ?p ?x }",
        "SELECT ?x { ?x ?p ?o } extra",
        "SELECT ?x { ?x ?p ?o } %",
    ],
)
def test_syntax_errors(text):
    with pytest.raises(QuerySyntaxError):
        parse_query(text)


def test_error_position():
    with pytest.raises(QuerySyntaxError) as info:
        parse_query("SELECT ?x { ?x ?p ?o } %")
    assert info.value.position == 23
    assert "Position 23" in str(info.value)


@pytest.mark.parametrize(
    "text",
    [
        "ASK { ?x ?p ?o }",
        "SELECT ?x { ?x ?p ?o . OPTIONAL { ?x ?q ?z } }",
        "SELECT ?x { ?x ?p ?o . FILTER (?o) }",
        "SELECT ?x { ?x ?p ?o } LIMIT 10",
        "SELECT ?x { ?x ?p _:b }",
        "SELECT (?x AS ?y) { ?x ?p ?o }",
        "CONSTRUCT { ?x ?p ?o } WHERE { ?x ?p ?o }",
        "SELECT ?x { ?x <http://e/p>/<http://e/q> ?o }",
        "SELECT ?x { ?x ?p ?o . MINUS { ?x a <http://e/C> } }",
        "SELECT ?x { { SELECT ?x { ?x ?p ?o } } }",
        "SELECT ?x { ?x ?p ?o } ORDER BY ?x",
    ],
)
def test_unsupported(text):
    with pytest.raises(UnsupportedFeatureError):
        parse_query(text)


def test_default_base_for_bare_names():
    query = parse_query("SELECT ?x WHERE { ?x rdf:type Professor . }")
    assert query.branches == (
        (
            TriplePattern(
                Var("x"),
                Const(Term.iri(RDF_TYPE)),
                Const(Term.iri(UB + "Professor")),
            ),
        ),
    )
    relative = parse_query("SELECT ?x { ?x a <Chair> }")
    assert relative.branches[0][0].o == Const(Term.iri(UB + "Chair"))


def test_unknown_prefix_position():
    with pytest.raises(QuerySyntaxError) as info:
        parse_query("SELECT ?x { ?x a ex:Professor }")
    assert info.value.position == 17


def test_keywords_any_case():
    query = parse_query("select distinct ?x where { ?x a Chair }")
    assert query.distinct
    assert query.projection == ("x",)


def test_written_order_kept():
    query = parse_query(
        "SELECT ?x { ?x worksFor ?y . ?y a Department . ?x a Chair }"
    )
    assert [str(pattern.o) for pattern in query.branches[0]] == [
        "?y",
        f"<{UB}Department>",
        f"<{UB}Chair>",
    ]


def test_query_validation():
    pattern = TriplePattern(Var("x"), const("teaches"), Var("y"))
    with pytest.raises(ValueError):
        Query(("z",), ((pattern,),))
    with pytest.raises(ValueError):
        Query(("x",), ())
    with pytest.raises(ValueError):
        TriplePattern(Var("x"), Const(Term.literal("p")), Var("y"))
