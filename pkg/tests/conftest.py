"""Shared fixtures."""
import pytest
from rdfinterval.dataset import EncodingMode, encode_dataset, split_partitions
from rdfinterval.hierarchy import encode_tbox
from rdfinterval.rdf import (
    AxiomKind,
    SchemaAxiom,
    Term,
    Triple,
    RDF_TYPE,
    discover_schema_terms,
    declared_terms,
    extract_schema,
)
from rdfinterval.testkit import MiniLubmSpec, gen_mini_lubm


EX = "http://example.org/univ#"


def ex(name) -> Term:
    return Term.iri(EX + name)


def type_triple(subject, concept) -> Triple:
    return Triple(ex(subject), Term.iri(RDF_TYPE), ex(concept))


@pytest.fixture
def example_axioms():
    """Professor is a FacultyMember; whoever teaches is a FacultyMember."""
    return [
        SchemaAxiom(
            AxiomKind.SUB_CLASS_OF, ex("Professor"), ex("FacultyMember")
        ),
        SchemaAxiom(AxiomKind.DOMAIN, ex("teaches"), ex("FacultyMember")),
    ]


@pytest.fixture
def example_triples():
    return [
        type_triple("bernd", "Professor"),
        Triple(ex("hubert"), ex("teaches"), ex("course1")),
    ]


@pytest.fixture
def example_tbox(example_axioms, example_triples):
    concepts, properties = discover_schema_terms(example_triples)
    return encode_tbox(example_axioms, concepts, properties)


@pytest.fixture
def example_dataset(example_tbox, example_triples):
    return encode_dataset(split_partitions(example_triples, 2), example_tbox)


def encode_kb(axioms, triples, partitions=2, mode=EncodingMode.OBE):
    """Encode instance triples with a TBox built from axioms and the data."""
    concepts, properties = discover_schema_terms(triples)
    tbox = encode_tbox(axioms, concepts, properties)
    return encode_dataset(
        split_partitions(triples, partitions), tbox, partitions, mode
    )


@pytest.fixture(scope="session")
def lubm_kb():
    """Small university KB: (axioms, instance triples, TBox)."""
    schema, abox = gen_mini_lubm(MiniLubmSpec(2, 2, 4, 5, seed=3))
    axioms = extract_schema(schema)
    concepts, properties = declared_terms(schema)
    found_concepts, found_properties = discover_schema_terms(abox)
    tbox = encode_tbox(
        axioms, concepts + found_concepts, properties + found_properties
    )
    return axioms, abox, tbox
