"""RDF terms, N-Triples input/output and schema axiom extraction."""
from .terms import (
    Term,
    TermKind,
    Triple,
    SchemaAxiom,
    AxiomKind,
    RDF_TYPE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    RDFS_DOMAIN,
    RDFS_RANGE,
    OWL_THING,
    TOP_PROPERTY,
)
from .ntriples import (
    ParseStats,
    parse_ntriples,
    parse_term,
    serialize_ntriples,
    read_ntriples,
    write_ntriples,
)
from .schema import extract_schema, discover_schema_terms, declared_terms
