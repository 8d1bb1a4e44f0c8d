"""Deterministic data generators for tests and benchmarks.

Every generator is a pure function of its arguments: the same seed always
produces the same triples in the same order.
"""
import logging
import math
from collections import deque
from dataclasses import dataclass, field
import numpy as np
from rdflib.namespace import XSD
from ..hierarchy import ROOTS, SUB_AXIOMS, EntityKind
from ..rdf.terms import RDF_TYPE, SchemaAxiom, AxiomKind, Term, Triple
from . import lubm


_LOGGER = logging.getLogger(__name__)
EXAMPLE_NS = "http://example.org/random#"
PROFESSOR_TYPES = [
    "Professor",
    "AssistantProfessor",
    "AssociateProfessor",
    "FullProfessor",
    "VisitingProfessor",
    "Dean",
]
DEGREE_PROPERTIES = [
    "doctoralDegreeFrom",
    "mastersDegreeFrom",
    "undergraduateDegreeFrom",
]
STUDENT_TYPES = ["GraduateStudent", "UndergraduateStudent"]


@dataclass(frozen=True)
class MiniLubmSpec:
    """Size of a generated university dataset.

    :param int universities:  number of universities
    :param int departments:  departments per university
    :param int professors:  professors per department
    :param int students:  students per department
    :param int seed:  random seed
    """

    universities: int = 1
    departments: int = 1
    professors: int = 1
    students: int = 1
    seed: int = 0

    def __post_init__(self):
        for name in ("universities", "departments", "professors", "students"):
            if getattr(self, name) < 0:
                value = getattr(self, name)
                err = f"{name} must be non-negative, got {value}."
                raise ValueError(err)


def mini_lubm_triple_count(spec) -> int:
    """Number of instance triples :func:`gen_mini_lubm` emits.

    With U universities, D departments, F professors and S students,
    ``2U + U*D*(5 + 8F + ceil(F/2) + 3[F>0] + S*(3 + 2[F>0]))``.

    :param MiniLubmSpec spec:  dataset size
    :returns:  triple count
    """
    has_staff = 1 if spec.professors > 0 else 0
    per_department = (
        5
        + 8 * spec.professors
        + math.ceil(spec.professors / 2)
        + 3 * has_staff
        + spec.students * (3 + 2 * has_staff)
    )
    return 2 * spec.universities + (
        spec.universities * spec.departments * per_department
    )


def _literal(text) -> Term:
    return Term.literal(text)


def _pick(rng, items):
    return items[rng.integers(len(items))]


def gen_mini_lubm(spec) -> tuple:
    """Generate a small university knowledge base.

    Each department has a chair (typed Chair and, redundantly, Professor)
    heading it, professors working for it, courses they teach and
    students who are members of it. Half of the courses and a guest
    lecturer carry no type of their own: their types follow from the
    domain and range of ``teaches`` and ``takesCourse``.

    :param MiniLubmSpec spec:  dataset size
    :returns:  (schema triples, instance triples)
    """
    rng = np.random.default_rng(spec.seed)
    ub = lubm.ub
    rdf_type = Term.iri(RDF_TYPE)
    tenure = [
        Term.literal(value, datatype=str(XSD.boolean))
        for value in ("false", "true")
    ]
    triples = []

    def add(s, p, o):
        triples.append(Triple(s, p if isinstance(p, Term) else ub(p), o))

    universities = [
        Term.iri(f"http://www.University{u}.edu")
        for u in range(spec.universities)
    ]
    for u, university in enumerate(universities):
        add(university, rdf_type, ub("University"))
        add(university, "name", _literal(f"University{u}"))
    for u, university in enumerate(universities):
        for d in range(spec.departments):
            base = f"http://www.Department{d}.University{u}.edu"
            department = Term.iri(base)
            group = Term.iri(f"{base}/ResearchGroup0")
            add(department, rdf_type, ub("Department"))
            add(department, "subOrganizationOf", university)
            add(department, "name", _literal(f"Department{d}"))
            add(group, rdf_type, ub("ResearchGroup"))
            add(group, "subOrganizationOf", department)
            professors = [
                Term.iri(f"{base}/Professor{f}")
                for f in range(spec.professors)
            ]
            courses = [
                Term.iri(f"{base}/Course{f}") for f in range(spec.professors)
            ]
            if professors:
                guest = Term.iri(f"{base}/GuestLecturer0")
                add(guest, "teaches", courses[0])
                add(guest, "name", _literal("GuestLecturer0"))
                add(professors[0], rdf_type, ub("Professor"))
            for f, professor in enumerate(professors):
                if f == 0:
                    add(professor, rdf_type, ub("Chair"))
                    add(professor, "headOf", department)
                else:
                    kind = _pick(rng, PROFESSOR_TYPES)
                    add(professor, rdf_type, ub(kind))
                    add(professor, "worksFor", department)
                add(professor, "name", _literal(f"Professor{f}"))
                add(
                    professor,
                    "emailAddress",
                    _literal(f"Professor{f}@Department{d}.University{u}.edu"),
                )
                add(professor, "teaches", courses[f])
                degree = _pick(rng, DEGREE_PROPERTIES)
                add(professor, degree, _pick(rng, universities))
                add(professor, "tenured", _pick(rng, tenure))
            for f, course in enumerate(courses):
                add(course, "name", _literal(f"Course{f}"))
                if f % 2 == 0:
                    kind = "GraduateCourse" if f % 4 == 0 else "Course"
                    add(course, rdf_type, ub(kind))
            for s in range(spec.students):
                student = Term.iri(f"{base}/Student{s}")
                kind = _pick(rng, STUDENT_TYPES)
                add(student, rdf_type, ub(kind))
                add(student, "memberOf", department)
                add(student, "name", _literal(f"Student{s}"))
                if professors:
                    add(student, "takesCourse", _pick(rng, courses))
                    add(student, "advisor", _pick(rng, professors))
    _LOGGER.info(f"Generated {len(triples)} university triples.")
    return lubm.schema_triples(), triples


@dataclass
class RandomHierarchy:
    """A generated hierarchy.

    :param list nodes:  IRIs; ``nodes[0]`` is the root
    :param list parents:  per node, the tuple of parent indices with the
        tree parent first (empty for the root)
    :param EntityKind kind:  concept or property hierarchy
    """

    nodes: list
    parents: list
    kind: EntityKind = EntityKind.CONCEPT

    @property
    def entities(self) -> list:
        """Non-root IRIs."""
        return self.nodes[1:]

    @property
    def axioms(self) -> list:
        """Sub-entity axioms: all tree edges first, then the extra edges."""
        sub_kind = SUB_AXIOMS[self.kind]
        tree = []
        extra = []
        for child, parents in enumerate(self.parents):
            for rank, parent in enumerate(parents):
                axiom = SchemaAxiom(
                    sub_kind,
                    Term.iri(self.nodes[child]),
                    Term.iri(self.nodes[parent]),
                )
                (tree if rank == 0 else extra).append(axiom)
        return tree + extra

    def ancestors(self, node) -> set:
        """Indices reachable upwards from ``node`` (itself included)."""
        seen = {node}
        stack = [node]
        while stack:
            for parent in self.parents[stack.pop()]:
                if parent not in seen:
                    seen.add(parent)
                    stack.append(parent)
        return seen


def gen_random_hierarchy(
    n,
    branching=3.0,
    dag_probability=0.0,
    seed=0,
    kind=EntityKind.CONCEPT,
    namespace=EXAMPLE_NS,
) -> RandomHierarchy:
    """Generate a random tree or DAG hierarchy.

    Nodes are attached breadth-first, each taking a Poisson number of
    children with mean ``branching``. Every non-root node except the
    root's children then gains, with probability ``dag_probability``, a
    second parent among the earlier nodes, so the result stays acyclic.

    :param int n:  number of nodes including the root (at least 1)
    :param float branching:  mean number of children per node
    :param float dag_probability:  chance of an extra parent per node
    :param int seed:  random seed
    :param EntityKind kind:  hierarchy kind (selects the root IRI)
    :param str namespace:  IRI prefix of generated entities
    :returns:  generated hierarchy
    """
    if n < 1:
        err = f"A hierarchy needs at least the root node, got n={n}."
        raise ValueError(err)
    rng = np.random.default_rng(seed)
    prefix = "C" if kind is EntityKind.CONCEPT else "P"
    nodes = [ROOTS[kind]] + [f"{namespace}{prefix}{i}" for i in range(1, n)]
    parents = [()]
    frontier = deque([0])
    while len(parents) < n:
        if frontier:
            node = frontier.popleft()
        else:
            node = int(rng.integers(len(parents)))
        count = int(rng.poisson(branching))
        if node == 0:
            count = max(count, 1)
        for _ in range(min(count, n - len(parents))):
            parents.append((node,))
            frontier.append(len(parents) - 1)
    for child in range(2, n):
        tree_parent = parents[child][0]
        if tree_parent == 0 or rng.random() >= dag_probability:
            continue
        extra = int(rng.integers(1, child))
        if extra != tree_parent:
            parents[child] = (tree_parent, extra)
    return RandomHierarchy(nodes, parents, kind)


@dataclass
class RandomKb:
    """A generated knowledge base.

    :param list axioms:  schema axioms
    :param list triples:  instance triples
    :param RandomHierarchy concepts:  concept hierarchy
    :param RandomHierarchy properties:  object property hierarchy
    :param list datatype_properties:  literal-valued property IRIs
    """

    axioms: list
    triples: list
    concepts: RandomHierarchy = field(repr=False)
    properties: RandomHierarchy = field(repr=False)
    datatype_properties: list = field(default_factory=list)


def gen_random_kb(
    seed=0,
    concepts=30,
    properties=10,
    individuals=50,
    triples=300,
    dag_probability=0.2,
    type_ratio=0.3,
    literal_ratio=0.1,
    datatype_properties=2,
) -> RandomKb:
    """Generate a small random knowledge base.

    Object properties get a domain and a range with probability one half
    each; datatype properties only get domains so range typing never
    applies to literals.

    :param int seed:  random seed
    :param int concepts:  concept hierarchy size (root included)
    :param int properties:  object property hierarchy size (root included)
    :param int individuals:  number of individual IRIs
    :param int triples:  number of instance triples drawn (duplicates kept)
    :param float dag_probability:  extra-parent probability of both
        hierarchies
    :param float type_ratio:  share of rdf:type triples
    :param float literal_ratio:  share of literal-valued triples
    :param int datatype_properties:  number of literal-valued properties
    :returns:  generated knowledge base
    """
    rng = np.random.default_rng(seed)
    concept_tree = gen_random_hierarchy(
        max(concepts, 2), 3.0, dag_probability, seed, EntityKind.CONCEPT
    )
    property_tree = gen_random_hierarchy(
        max(properties, 2), 2.0, dag_probability, seed + 1, EntityKind.PROPERTY
    )
    datatypes = [f"{EXAMPLE_NS}D{i}" for i in range(datatype_properties)]
    axioms = concept_tree.axioms + property_tree.axioms

    def concept():
        return Term.iri(_pick(rng, concept_tree.entities))

    for prop in property_tree.entities:
        if rng.random() < 0.5:
            axioms.append(
                SchemaAxiom(AxiomKind.DOMAIN, Term.iri(prop), concept())
            )
        if rng.random() < 0.5:
            axioms.append(
                SchemaAxiom(AxiomKind.RANGE, Term.iri(prop), concept())
            )
    for prop in datatypes:
        axioms.append(
            SchemaAxiom(AxiomKind.DOMAIN, Term.iri(prop), concept())
        )
    people = [
        Term.iri(f"{EXAMPLE_NS}i{i}") for i in range(max(individuals, 1))
    ]
    rdf_type = Term.iri(RDF_TYPE)
    abox = []
    for index in range(triples):
        subject = _pick(rng, people)
        draw = rng.random()
        if draw < type_ratio:
            abox.append(Triple(subject, rdf_type, concept()))
        elif datatypes and draw < type_ratio + literal_ratio:
            prop = _pick(rng, datatypes)
            value = Term.literal(f"v{index}")
            abox.append(Triple(subject, Term.iri(prop), value))
        else:
            prop = _pick(rng, property_tree.entities)
            target = _pick(rng, people)
            abox.append(Triple(subject, Term.iri(prop), target))
    return RandomKb(axioms, abox, concept_tree, property_tree, datatypes)
