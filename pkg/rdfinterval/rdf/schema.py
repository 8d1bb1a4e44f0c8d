"""Extract the RDFS axiom subset carried as ordinary triples."""
import logging
from rdflib.namespace import OWL, RDF, RDFS
from ..errors import InvalidAxiomError
from .terms import RDF_TYPE, AxiomKind, SchemaAxiom, TermKind


_LOGGER = logging.getLogger(__name__)
AXIOM_PREDICATES = {kind.value: kind for kind in AxiomKind}
CLASS_TYPES = frozenset(str(iri) for iri in (OWL.Class, RDFS.Class))
PROPERTY_TYPES = frozenset(
    str(iri)
    for iri in (RDF.Property, OWL.ObjectProperty, OWL.DatatypeProperty)
)


def extract_schema(triples) -> list:
    """Collect schema axioms from triples.

    Triples whose predicate is rdfs:subClassOf, rdfs:subPropertyOf,
    rdfs:domain or rdfs:range become axioms (in input order); all other
    triples are ignored. Axioms with blank-node terms (typically OWL
    class restrictions) are skipped with a warning.

    :param triples:  iterable of triples
    :returns:  list of schema axioms
    :raises InvalidAxiomError:  if a schema predicate has a literal object
    """
    axioms = []
    skipped = 0
    for triple in triples:
        kind = AXIOM_PREDICATES.get(triple.p.lexical)
        if kind is None:
            continue
        if triple.o.kind is TermKind.LITERAL:
            err = f"Schema predicate with literal object: {triple.n3()}"
            raise InvalidAxiomError(err)
        if TermKind.BLANK_NODE in (triple.s.kind, triple.o.kind):
            skipped += 1
            _LOGGER.debug(f"Skipping blank-node axiom {triple.n3()}")
            continue
        axioms.append(SchemaAxiom(kind, triple.s, triple.o))
    if skipped:
        _LOGGER.warning(f"Skipped {skipped} axioms with blank nodes.")
    _LOGGER.debug(f"Extracted {len(axioms)} schema axioms.")
    return axioms


def discover_schema_terms(triples) -> tuple:
    """Find the schema terms used by instance data.

    :param triples:  iterable of triples
    :returns:  (concept IRIs, property IRIs), each a list in order of
        first occurrence; concepts are the IRI objects of rdf:type
    """
    concepts = {}
    properties = {}
    for triple in triples:
        properties.setdefault(triple.p.lexical, None)
        if triple.p.lexical == RDF_TYPE and triple.o.kind is TermKind.IRI:
            concepts.setdefault(triple.o.lexical, None)
    return list(concepts), list(properties)


def declared_terms(triples) -> tuple:
    """Find concepts and properties declared with rdf:type statements.

    ``owl:Class`` and ``rdfs:Class`` declare concepts; ``rdf:Property``,
    ``owl:ObjectProperty`` and ``owl:DatatypeProperty`` declare
    properties. Declarations let a schema name entities that appear in no
    axiom.

    :param triples:  iterable of triples
    :returns:  (concept IRIs, property IRIs) in order of first declaration
    """
    concepts = {}
    properties = {}
    for triple in triples:
        if triple.p.lexical != RDF_TYPE or not triple.s.is_iri:
            continue
        if triple.o.lexical in CLASS_TYPES:
            concepts.setdefault(triple.s.lexical, None)
        elif triple.o.lexical in PROPERTY_TYPES:
            properties.setdefault(triple.s.lexical, None)
    return list(concepts), list(properties)
