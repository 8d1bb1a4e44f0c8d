"""Brute-force reference answers.

Nothing here uses the interval codes: entailment is a naive fixpoint over
an rdflib graph and query answering is nested-loop pattern matching.
Both are quadratic at best and meant for small inputs only.
"""
import logging
from collections import defaultdict
import numpy as np
from rdflib import Graph, Literal, URIRef
from rdflib.namespace import RDF
from ..rdf.terms import (
    OWL_THING,
    TOP_PROPERTY,
    AxiomKind,
    Triple,
    from_rdflib,
    to_rdflib,
)
from ..query.sparql import Const, Disjunction, Var


_LOGGER = logging.getLogger(__name__)
RULES = ("subproperty", "domain", "range", "subclass")


class ClosureOracle:
    """Reflexive-transitive closures of the sub-concept and sub-property
    relations, computed by depth-first search over the axioms.

    :param axioms:  schema axioms
    """

    def __init__(self, axioms):
        parents = {
            AxiomKind.SUB_CLASS_OF: defaultdict(set),
            AxiomKind.SUB_PROPERTY_OF: defaultdict(set),
        }
        for axiom in axioms:
            if axiom.kind in parents:
                parents[axiom.kind][axiom.subject.lexical].add(
                    axiom.object.lexical
                )
        self.subclass = self._close(parents[AxiomKind.SUB_CLASS_OF])
        self.subproperty = self._close(parents[AxiomKind.SUB_PROPERTY_OF])

    @staticmethod
    def _close(parents) -> set:
        nodes = set(parents)
        for targets in parents.values():
            nodes |= targets
        pairs = set()
        for node in nodes:
            seen = {node}
            stack = [node]
            while stack:
                for parent in parents.get(stack.pop(), ()):
                    if parent not in seen:
                        seen.add(parent)
                        stack.append(parent)
            pairs.update((node, ancestor) for ancestor in seen)
        return pairs

    def is_subclass(self, sub, sup) -> bool:
        return sub == sup or (sub, sup) in self.subclass

    def is_subproperty(self, sub, sup) -> bool:
        return sub == sup or (sub, sup) in self.subproperty


def oracle_entails(triples, axioms, seed=0) -> set:
    """RDFS closure of instance triples by chaotic iteration.

    The four rules (sub-property, domain, range and sub-class) are applied
    in a random order, reshuffled every round, until a round adds
    nothing. Sub-entity axioms that only restate the top concept or top
    property are ignored, since those roots are never materialized.
    Range typing skips literal objects.

    :param triples:  instance triples
    :param axioms:  schema axioms
    :param int seed:  seed of the rule order
    :returns:  set of triples in the closure (input included)
    """
    rng = np.random.default_rng(seed)
    rdf_type = URIRef(str(RDF.type))
    schema = defaultdict(lambda: defaultdict(set))
    for axiom in axioms:
        target = axiom.object.lexical
        if target in (OWL_THING, TOP_PROPERTY) and axiom.kind in (
            AxiomKind.SUB_CLASS_OF,
            AxiomKind.SUB_PROPERTY_OF,
        ):
            continue
        schema[axiom.kind][URIRef(axiom.subject.lexical)].add(URIRef(target))
    graph = Graph()
    for triple in triples:
        terms = (triple.s, triple.p, triple.o)
        graph.add(tuple(to_rdflib(term) for term in terms))

    def apply(rule) -> list:
        derived = []
        if rule == "subclass":
            table = schema[AxiomKind.SUB_CLASS_OF]
            for s, _, o in graph.triples((None, rdf_type, None)):
                derived.extend((s, rdf_type, sup) for sup in table.get(o, ()))
            return derived
        table = {
            "subproperty": schema[AxiomKind.SUB_PROPERTY_OF],
            "domain": schema[AxiomKind.DOMAIN],
            "range": schema[AxiomKind.RANGE],
        }[rule]
        for s, p, o in graph:
            for target in table.get(p, ()):
                if rule == "subproperty":
                    derived.append((s, target, o))
                elif rule == "domain":
                    derived.append((s, rdf_type, target))
                elif not isinstance(o, Literal):
                    derived.append((o, rdf_type, target))
        return derived

    rounds = 0
    changed = True
    while changed:
        changed = False
        rounds += 1
        for index in rng.permutation(len(RULES)):
            for triple in apply(RULES[index]):
                if triple not in graph:
                    graph.add(triple)
                    changed = True
    _LOGGER.debug(
        f"Closure reached after {rounds} rounds: {len(graph)} triples."
    )
    return {
        Triple(from_rdflib(s), from_rdflib(p), from_rdflib(o))
        for s, p, o in graph
    }


def _match(pattern, triple, binding):
    if pattern.resource_object and triple[2].is_literal:
        return None
    extended = dict(binding)
    for item, term in zip((pattern.s, pattern.p, pattern.o), triple):
        if isinstance(item, Var):
            bound = extended.get(item.name)
            if bound is None:
                extended[item.name] = term
            elif bound != term:
                return None
        elif item.term != term:
            return None
    return extended


def _candidates(pattern, closure, by_predicate):
    if isinstance(pattern.p, Const):
        return by_predicate.get(pattern.p.term, ())
    return closure


def _extend(element, bindings, closure, by_predicate) -> list:
    if isinstance(element, Disjunction):
        result = []
        for binding in bindings:
            keep = set(binding) | set(element.visible)
            seen = set()
            for alternative in element.alternatives:
                for extended in _extend(
                    alternative, [binding], closure, by_predicate
                ):
                    key = tuple(
                        sorted(
                            (name, term)
                            for name, term in extended.items()
                            if name in keep
                        )
                    )
                    if key not in seen:
                        seen.add(key)
                        result.append(dict(key))
        return result
    result = []
    for binding in bindings:
        for triple in _candidates(element, closure, by_predicate):
            extended = _match(element, (triple.s, triple.p, triple.o), binding)
            if extended is not None:
                result.append(extended)
    return result


def oracle_answer(query, triples, axioms, seed=0) -> set:
    """Answer a query by naive matching over the RDFS closure.

    :param Query query:  parsed (not located) query
    :param triples:  instance triples
    :param axioms:  schema axioms
    :param int seed:  seed of the closure rule order
    :returns:  set of rows, each a tuple of terms in projection order
    """
    closure = oracle_entails(triples, axioms, seed)
    by_predicate = defaultdict(list)
    for triple in closure:
        by_predicate[triple.p].append(triple)
    rows = set()
    for branch in query.branches:
        bindings = [{}]
        for element in branch:
            bindings = _extend(element, bindings, closure, by_predicate)
            if not bindings:
                break
        for binding in bindings:
            rows.add(tuple(binding[name] for name in query.projection))
    return rows
