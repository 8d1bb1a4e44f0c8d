"""Test query rewriting against the bundled university schema."""
import pytest
from rdfinterval.dataset import encode_dataset, split_partitions
from rdfinterval.query import (
    Disjunction,
    IsIn,
    TriplePattern,
    Var,
    build_plan,
    execute,
    extract_results,
    locate_query,
    parse_query,
    pattern_alternatives,
    plan_summary,
    rewrite_disjunctive,
    rewrite_query,
)
from rdfinterval.query.plan import NotLiteral
from rdfinterval.rdf import AxiomKind, SchemaAxiom, Term, Triple
from rdfinterval.testkit import LUBM_QUERIES, UB, oracle_answer
from conftest import EX, encode_kb, ex, type_triple


def run(query, ds, entailment) -> set:
    plan = build_plan(locate_query(query, ds), ds.tbox, entailment)
    return set(extract_results(execute(plan, ds).distinct(), ds))


@pytest.fixture(scope="module")
def lubm_dataset(lubm_kb):
    _, abox, tbox = lubm_kb
    return encode_dataset(split_partitions(abox, 3), tbox)


@pytest.mark.parametrize(
    "name,branches", [("Q1", 8), ("Q2", 3), ("Q3", 24), ("Q4", 2)]
)
def test_branch_counts(lubm_kb, name, branches):
    _, _, tbox = lubm_kb
    rewritten = rewrite_query(parse_query(LUBM_QUERIES[name]), tbox)
    assert len(rewritten.branches) == branches
    assert all(
        len(branch) == len(parse_query(LUBM_QUERIES[name]).branches[0])
        for branch in rewritten.branches
    )


def test_professor_alternatives(lubm_kb):
    _, _, tbox = lubm_kb
    pattern = parse_query(LUBM_QUERIES["Q1"]).branches[0][0]
    alternatives = pattern_alternatives(pattern, tbox, iter(["_rw1"]))
    assert alternatives[0] == pattern
    assert len(alternatives) == 8
    assert all(alt.is_type for alt in alternatives)
    objects = {alt.o.term.lexical.removeprefix(UB) for alt in alternatives}
    assert objects == {
        "Professor",
        "AssistantProfessor",
        "AssociateProfessor",
        "FullProfessor",
        "VisitingProfessor",
        "Chair",
        "Dean",
        "Faculty",
    }


def test_fresh_names_avoid_query_variables(lubm_kb):
    _, _, tbox = lubm_kb
    query = parse_query(
        f"SELECT ?x ?_rw1 {{ ?x a <{UB}FacultyMember> . "
        f"?x <{UB}name> ?_rw1 }}"
    )
    rewritten = rewrite_query(query, tbox)
    teaching = [
        branch
        for branch in rewritten.branches
        if branch[0].p.term.lexical == UB + "teaches"
    ]
    assert teaching[0][0] == TriplePattern(
        Var("x"), teaching[0][0].p, Var("_rw2")
    )
    advised = [
        branch
        for branch in rewritten.branches
        if branch[0].p.term.lexical == UB + "advisor"
    ]
    assert advised[0][0].s == Var("_rw2")
    assert advised[0][0].resource_object


def test_unknown_terms_kept(lubm_kb):
    _, _, tbox = lubm_kb
    query = parse_query(
        "SELECT ?x { ?x <http://other/p> ?y . ?x a <http://other/C> }"
    )
    assert rewrite_query(query, tbox).branches == query.branches


def test_disjunctive_shape(lubm_kb):
    _, _, tbox = lubm_kb
    query = rewrite_disjunctive(parse_query(LUBM_QUERIES["Q3"]), tbox)
    assert len(query.branches) == 1
    first, second = query.branches[0]
    assert isinstance(first, Disjunction) and len(first.alternatives) == 8
    assert isinstance(second, Disjunction) and len(second.alternatives) == 3
    assert first.visible == ("x",)


def test_disjunctive_plan_uses_membership(lubm_dataset):
    tbox = lubm_dataset.tbox
    query = rewrite_disjunctive(parse_query(LUBM_QUERIES["Q1"]), tbox)
    plan = build_plan(locate_query(query, lubm_dataset), tbox, False)
    summary = plan_summary(plan)
    assert summary["scans"] == 1
    assert summary["membership_predicates"] == 1
    assert summary["interval_predicates"] == 0
    membership = plan.root.child.child.predicates
    assert any(
        isinstance(predicate, IsIn) and len(predicate.values) == 8
        for predicate in membership
    )


def test_interval_plan_smaller_than_rewrite(lubm_dataset):
    query = parse_query(LUBM_QUERIES["Q1"])
    interval = build_plan(locate_query(query, lubm_dataset), lubm_dataset.tbox)
    rewritten = rewrite_query(query, lubm_dataset.tbox)
    union = build_plan(
        locate_query(rewritten, lubm_dataset), lubm_dataset.tbox, False
    )
    assert plan_summary(interval)["scans"] == 1
    assert plan_summary(interval)["interval_predicates"] == 1
    assert plan_summary(union)["scans"] == 8
    assert plan_summary(union)["interval_predicates"] == 0
    assert plan_summary(union)["unions"] == 1


@pytest.mark.parametrize("name", sorted(LUBM_QUERIES))
def test_rewrite_forms_agree(lubm_dataset, name):
    query = parse_query(LUBM_QUERIES[name])
    tbox = lubm_dataset.tbox
    cartesian = run(rewrite_query(query, tbox), lubm_dataset, False)
    disjunctive = run(rewrite_disjunctive(query, tbox), lubm_dataset, False)
    assert cartesian == disjunctive
    assert cartesian


def test_range_alternative_skips_literals():
    axioms = [SchemaAxiom(AxiomKind.RANGE, ex("label"), ex("Named"))]
    triples = [
        Triple(ex("a"), ex("label"), Term.literal("hello")),
        Triple(ex("c"), ex("label"), ex("d")),
        type_triple("b", "Named"),
    ]
    ds = encode_kb(axioms, triples)
    query = parse_query("SELECT ?x { ?x a Named }", base=EX)
    expected = {(ex("b"),), (ex("d"),)}
    rewritten = rewrite_query(query, ds.tbox)
    assert run(rewritten, ds, False) == expected
    assert run(rewrite_disjunctive(query, ds.tbox), ds, False) == expected
    assert oracle_answer(rewritten, triples, []) == expected
    assert oracle_answer(query, triples, axioms) == expected
    plan = build_plan(locate_query(rewritten, ds), ds.tbox, False)
    scan = plan.root.branches[1].child
    assert scan.predicates[-1] == NotLiteral(
        "o", frozenset({ds.individuals.locate(Term.literal("hello"))})
    )
    assert "FILTER (!isLiteral(?x))" in rewritten.to_sparql()
