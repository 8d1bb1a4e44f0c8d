"""Rewrite queries so that plain matching over non-materialized data
returns the entailed answers.

A pattern with a constant property is replaced by the alternatives of
every sub-property. An rdf:type pattern with a constant concept is
replaced by the alternatives of every sub-concept, plus one alternative
per property whose domain (or range) lies below the concept. Range
alternatives only match IRI or blank node objects: a literal value of a
ranged property is not typed.
"""
import itertools
import logging
from ..hierarchy import EntityKind
from ..rdf.terms import Term
from .sparql import (
    Const,
    Disjunction,
    Query,
    TriplePattern,
    Var,
    branch_variables,
)


_LOGGER = logging.getLogger(__name__)
FRESH_PREFIX = "_rw"


def _fresh_names(query):
    used = set()
    for branch in query.branches:
        used.update(branch_variables(branch))
    for number in itertools.count(1):
        name = f"{FRESH_PREFIX}{number}"
        if name not in used:
            yield name


def _iri(iri) -> Const:
    return Const(Term.iri(iri))


def _type_alternatives(pattern, tbox, fresh) -> list:
    concepts = tbox.concepts
    concept = concepts.code(pattern.o.term.lexical).value
    alternatives = [pattern]
    for value in tbox.descendants(EntityKind.CONCEPT, concept)[1:]:
        alternatives.append(
            TriplePattern(pattern.s, pattern.p, _iri(concepts.by_value[value]))
        )
    by_domain = []
    by_range = []
    for prop in tbox.properties.sorted_values():
        if prop in (tbox.type_id, tbox.properties.root_value):
            continue
        iri = _iri(tbox.properties.by_value[prop])
        if any(
            tbox.subsumes(EntityKind.CONCEPT, domain, concept)
            for domain in tbox.effective_domains(prop)
        ):
            by_domain.append(iri)
        if any(
            tbox.subsumes(EntityKind.CONCEPT, range_, concept)
            for range_ in tbox.effective_ranges(prop)
        ):
            by_range.append(iri)
    if by_domain or by_range:
        other = Var(next(fresh))
        alternatives.extend(
            TriplePattern(pattern.s, iri, other) for iri in by_domain
        )
        alternatives.extend(
            TriplePattern(other, iri, pattern.s, resource_object=True)
            for iri in by_range
        )
    return alternatives


def pattern_alternatives(pattern, tbox, fresh) -> list:
    """Alternatives of one triple pattern, the pattern itself first.

    :param TriplePattern pattern:  parsed (not located) pattern
    :param TBoxEncoding tbox:  schema codes
    :param fresh:  iterator of unused variable names
    :returns:  list of patterns
    """
    if not isinstance(pattern.p, Const):
        return [pattern]
    if pattern.is_type:
        obj = pattern.o
        if isinstance(obj, Const) and obj.term.lexical in tbox.concepts:
            return _type_alternatives(pattern, tbox, fresh)
        return [pattern]
    properties = tbox.properties
    if pattern.p.term.lexical not in properties:
        return [pattern]
    prop = properties.code(pattern.p.term.lexical).value
    return [pattern] + [
        TriplePattern(pattern.s, _iri(properties.by_value[value]), pattern.o)
        for value in tbox.descendants(EntityKind.PROPERTY, prop)[1:]
        if value != tbox.type_id
    ]


def rewrite_query(query, tbox) -> Query:
    """Expand a query into a UNION of conjunctive queries.

    A conjunction of k patterns with n1..nk alternatives becomes
    n1 * ... * nk conjunctions.

    :param Query query:  parsed query
    :param TBoxEncoding tbox:  schema codes
    :returns:  rewritten query
    """
    fresh = _fresh_names(query)
    branches = []
    for branch in query.branches:
        options = [
            pattern_alternatives(pattern, tbox, fresh) for pattern in branch
        ]
        branches.extend(itertools.product(*options))
    rewritten = Query(query.projection, tuple(branches), query.distinct)
    _LOGGER.info(
        f"Rewrote {len(query.branches)} branches into {len(branches)} "
        f"branches."
    )
    return rewritten


def rewrite_disjunctive(query, tbox) -> Query:
    """Rewrite each pattern into a disjunction of its alternatives.

    The conjunction structure is kept: this is a conjunction of OR
    sub-queries rather than a UNION of conjunctions.

    :param Query query:  parsed query
    :param TBoxEncoding tbox:  schema codes
    :returns:  query whose elements may be :class:`Disjunction` objects
    """
    fresh = _fresh_names(query)
    branches = []
    for branch in query.branches:
        elements = []
        for pattern in branch:
            alternatives = pattern_alternatives(pattern, tbox, fresh)
            if len(alternatives) == 1:
                elements.append(pattern)
            else:
                elements.append(Disjunction(tuple(alternatives)))
        branches.append(tuple(elements))
    return Query(query.projection, tuple(branches), query.distinct)
