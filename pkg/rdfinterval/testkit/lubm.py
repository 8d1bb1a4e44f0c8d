"""Bundled university schema and the benchmark queries over it.

The schema follows the shape of the Lehigh University Benchmark ontology
with 44 concepts and 32 properties (25 object and 7 datatype properties),
21 domain and 18 range axioms. The concept hierarchy is already
classified: every subsumption is an explicit rdfs:subClassOf triple.
Professor has seven sub-concepts, so the benchmark query over it
rewrites into eight alternatives.
"""
from rdflib.namespace import OWL, RDF, RDFS
from ..query.sparql import DEFAULT_BASE
from ..rdf.terms import OWL_THING, Term, Triple


UB = DEFAULT_BASE
#: (concept, parent) in declaration order; ``None`` is the root
CONCEPT_TREE = [
    ("Schedule", None),
    ("Organization", None),
    ("Publication", None),
    ("Person", None),
    ("Work", None),
    ("College", "Organization"),
    ("Department", "Organization"),
    ("Institute", "Organization"),
    ("Program", "Organization"),
    ("ResearchGroup", "Organization"),
    ("University", "Organization"),
    ("Article", "Publication"),
    ("Book", "Publication"),
    ("Manual", "Publication"),
    ("Software", "Publication"),
    ("Specification", "Publication"),
    ("UnofficialPublication", "Publication"),
    ("ConferencePaper", "Article"),
    ("JournalArticle", "Article"),
    ("TechnicalReport", "Article"),
    ("Employee", "Person"),
    ("Student", "Person"),
    ("Director", "Person"),
    ("TeachingAssistant", "Person"),
    ("ResearchAssistant", "Person"),
    ("Course", "Work"),
    ("Research", "Work"),
    ("GraduateCourse", "Course"),
    ("FacultyMember", "Employee"),
    ("AdministrativeStaff", "Employee"),
    ("GraduateStudent", "Student"),
    ("UndergraduateStudent", "Student"),
    ("Professor", "FacultyMember"),
    ("Lecturer", "FacultyMember"),
    ("PostDoc", "FacultyMember"),
    ("ClericalStaff", "AdministrativeStaff"),
    ("SystemsStaff", "AdministrativeStaff"),
    ("AssistantProfessor", "Professor"),
    ("AssociateProfessor", "Professor"),
    ("FullProfessor", "Professor"),
    ("VisitingProfessor", "Professor"),
    ("Chair", "Professor"),
    ("Dean", "Professor"),
    ("Faculty", "Professor"),
]
OBJECT_PROPERTIES = [
    "advisor",
    "affiliatedOrganizationOf",
    "affiliateOf",
    "degreeFrom",
    "doctoralDegreeFrom",
    "hasAlumnus",
    "headOf",
    "listedCourse",
    "mastersDegreeFrom",
    "member",
    "memberOf",
    "orgPublication",
    "publicationAuthor",
    "publicationResearch",
    "researchProject",
    "softwareDocumentation",
    "subOrganizationOf",
    "takesCourse",
    "teaches",
    "teachingAssistantOf",
    "undergraduateDegreeFrom",
    "worksFor",
    "researchAssistantOf",
    "directorOf",
    "enrolledIn",
]
DATATYPE_PROPERTIES = [
    "name",
    "emailAddress",
    "telephone",
    "officeNumber",
    "researchInterest",
    "title",
    "tenured",
]
SUB_PROPERTIES = [
    ("worksFor", "memberOf"),
    ("headOf", "worksFor"),
    ("doctoralDegreeFrom", "degreeFrom"),
    ("mastersDegreeFrom", "degreeFrom"),
    ("undergraduateDegreeFrom", "degreeFrom"),
]
DOMAINS = [
    ("advisor", "Person"),
    ("affiliatedOrganizationOf", "Organization"),
    ("affiliateOf", "Organization"),
    ("degreeFrom", "Person"),
    ("doctoralDegreeFrom", "Person"),
    ("hasAlumnus", "University"),
    ("headOf", "Employee"),
    ("listedCourse", "Schedule"),
    ("mastersDegreeFrom", "Person"),
    ("member", "Organization"),
    ("memberOf", "Person"),
    ("orgPublication", "Organization"),
    ("publicationAuthor", "Publication"),
    ("publicationResearch", "Publication"),
    ("researchProject", "ResearchGroup"),
    ("softwareDocumentation", "Software"),
    ("subOrganizationOf", "Organization"),
    ("takesCourse", "Student"),
    ("teaches", "FacultyMember"),
    ("teachingAssistantOf", "TeachingAssistant"),
    ("worksFor", "Employee"),
]
RANGES = [
    ("advisor", "FacultyMember"),
    ("affiliatedOrganizationOf", "Organization"),
    ("affiliateOf", "Person"),
    ("degreeFrom", "University"),
    ("doctoralDegreeFrom", "University"),
    ("hasAlumnus", "Person"),
    ("headOf", "Organization"),
    ("listedCourse", "Course"),
    ("mastersDegreeFrom", "University"),
    ("member", "Person"),
    ("memberOf", "Organization"),
    ("orgPublication", "Publication"),
    ("publicationAuthor", "Person"),
    ("publicationResearch", "Research"),
    ("researchProject", "Research"),
    ("subOrganizationOf", "Organization"),
    ("takesCourse", "Course"),
    ("teaches", "Course"),
]
CONCEPTS = [name for name, _ in CONCEPT_TREE]
PROPERTIES = OBJECT_PROPERTIES + DATATYPE_PROPERTIES
PREFIXES = f"""PREFIX rdf: <{RDF}>
PREFIX ub: <{UB}>
"""
LUBM_QUERIES = {
    "Q1": PREFIXES + "SELECT ?x WHERE { ?x rdf:type ub:Professor . }\n",
    "Q2": PREFIXES + "SELECT ?x ?y WHERE { ?x ub:memberOf ?y . }\n",
    "Q3": PREFIXES
    + "SELECT ?x ?y WHERE { ?x rdf:type ub:Professor . "
    + "?x ub:memberOf ?y . }\n",
    "Q4": PREFIXES
    + "SELECT ?x WHERE { ?x rdf:type ub:Chair . "
    + "?y rdf:type ub:Department . ?x ub:worksFor ?y . }\n",
}


def ub(name) -> Term:
    """IRI term in the university namespace."""
    return Term.iri(UB + name)


def _axiom(subject, predicate, obj) -> Triple:
    return Triple(ub(subject), Term.iri(str(predicate)), obj)


def schema_triples() -> list:
    """Schema as N-Triples-ready triples.

    Axioms come first, in the declaration order that fixes the sibling
    numbering, followed by one declaration per entity.

    :returns:  list of triples
    """
    triples = []
    for name, parent in CONCEPT_TREE:
        parent = Term.iri(OWL_THING) if parent is None else ub(parent)
        triples.append(_axiom(name, RDFS.subClassOf, parent))
    for child, parent in SUB_PROPERTIES:
        triples.append(_axiom(child, RDFS.subPropertyOf, ub(parent)))
    for prop, concept in DOMAINS:
        triples.append(_axiom(prop, RDFS.domain, ub(concept)))
    for prop, concept in RANGES:
        triples.append(_axiom(prop, RDFS.range, ub(concept)))
    for name in CONCEPTS:
        triples.append(_axiom(name, RDF.type, Term.iri(str(OWL.Class))))
    for name in OBJECT_PROPERTIES:
        triples.append(
            _axiom(name, RDF.type, Term.iri(str(OWL.ObjectProperty)))
        )
    for name in DATATYPE_PROPERTIES:
        triples.append(
            _axiom(name, RDF.type, Term.iri(str(OWL.DatatypeProperty)))
        )
    return triples
