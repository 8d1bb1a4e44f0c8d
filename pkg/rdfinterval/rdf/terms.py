"""RDF terms, triples and the schema axiom subset.

Literal identity is the exact lexical form: ``"1"^^xsd:int`` and
``"01"^^xsd:int`` are different terms. Escapes are normalized, so the
same literal written with ``\\u0041`` or ``A`` has one lexical form.
"""
import re
from dataclasses import dataclass
from enum import Enum
from rdflib import BNode, Literal, URIRef
from rdflib.namespace import OWL, RDF, RDFS


RDF_TYPE = str(RDF.type)
RDFS_SUBCLASSOF = str(RDFS.subClassOf)
RDFS_SUBPROPERTYOF = str(RDFS.subPropertyOf)
RDFS_DOMAIN = str(RDFS.domain)
RDFS_RANGE = str(RDFS.range)
OWL_THING = str(OWL.Thing)
TOP_PROPERTY = str(OWL.topObjectProperty)
IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\]')
BLANK_LABEL = re.compile(
    r"_:[A-Za-z0-9_·À-\U000effff]"
    r"(?:[A-Za-z0-9_\-.·À-\U000effff]*"
    r"[A-Za-z0-9_\-·À-\U000effff])?"
)
LITERAL_FORM = re.compile(
    r'"((?:[^"\\\n\r]|\\.)*)"'
    r"(?:@([A-Za-z]+(?:-[A-Za-z0-9]+)*)|\^\^<([^<>\s]+)>)?"
)
ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}
ESCAPE_SEQUENCE = re.compile(
    r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))", re.DOTALL
)


def unescape(text) -> str:
    """Resolve N-Triples string and numeric escapes.

    :param str text:  escaped text
    :returns:  unescaped text
    :raises ValueError:  on an unknown escape sequence
    """
    if "\\" not in text:
        return text

    def _replace(match):
        short, long, char = match.groups()
        if short or long:
            return chr(int(short or long, 16))
        if char in ESCAPES:
            return ESCAPES[char]
        err = f"Unknown escape sequence \\{char}."
        raise ValueError(err)

    return ESCAPE_SEQUENCE.sub(_replace, text)


def escape_literal(value) -> str:
    """Escape a literal value for N-Triples output.

    Tabs are escaped as well so that serialized terms never contain a raw
    tab (the dictionary file is tab-separated).

    :param str value:  unescaped literal value
    :returns:  escaped text without the surrounding quotes
    """
    return (
        value.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


class TermKind(Enum):
    """Kinds of RDF terms."""

    IRI = "iri"
    BLANK_NODE = "bnode"
    LITERAL = "literal"


@dataclass(frozen=True, slots=True)
class Term:
    """An IRI, blank node or literal.

    :param TermKind kind:  kind of term
    :param str lexical:  IRI text (without angle brackets), blank node
        ``_:label``, or the full literal form including quotes and suffix
    """

    kind: TermKind
    lexical: str

    def __post_init__(self):
        if self.kind is TermKind.IRI:
            if not self.lexical or IRI_FORBIDDEN.search(self.lexical):
                err = f"Invalid IRI: {self.lexical!r}."
                raise ValueError(err)
        elif self.kind is TermKind.BLANK_NODE:
            if not BLANK_LABEL.fullmatch(self.lexical):
                err = f"Invalid blank node label: {self.lexical!r}."
                raise ValueError(err)
        elif not LITERAL_FORM.fullmatch(self.lexical):
            err = f"Invalid literal: {self.lexical!r}."
            raise ValueError(err)

    @classmethod
    def iri(cls, value) -> "Term":
        """Build an IRI term."""
        return cls(TermKind.IRI, value)

    @classmethod
    def blank(cls, label) -> "Term":
        """Build a blank node; the ``_:`` prefix is optional."""
        if not label.startswith("_:"):
            label = f"_:{label}"
        return cls(TermKind.BLANK_NODE, label)

    @classmethod
    def literal(cls, value, language=None, datatype=None) -> "Term":
        """Build a literal from its unescaped value.

        :param str value:  literal value
        :param str language:  optional language tag
        :param str datatype:  optional datatype IRI
        :returns:  literal term
        """
        lexical = f'"{escape_literal(value)}"'
        if language:
            lexical += f"@{language}"
        elif datatype:
            lexical += f"^^<{datatype}>"
        return cls(TermKind.LITERAL, lexical)

    @property
    def is_iri(self) -> bool:
        return self.kind is TermKind.IRI

    @property
    def is_literal(self) -> bool:
        return self.kind is TermKind.LITERAL

    def _literal_parts(self):
        if self.kind is not TermKind.LITERAL:
            err = f"{self.n3()} is not a literal."
            raise ValueError(err)
        return LITERAL_FORM.fullmatch(self.lexical).groups()

    @property
    def value(self) -> str:
        """Unescaped literal value (or the IRI/label for other kinds)."""
        if self.kind is not TermKind.LITERAL:
            return self.lexical
        return unescape(self._literal_parts()[0])

    @property
    def language(self):
        return self._literal_parts()[1]

    @property
    def datatype(self):
        return self._literal_parts()[2]

    def n3(self) -> str:
        """N-Triples rendering of the term."""
        if self.kind is TermKind.IRI:
            return f"<{self.lexical}>"
        return self.lexical

    def __str__(self):
        return self.n3()


@dataclass(frozen=True, slots=True)
class Triple:
    """An RDF triple.

    :param Term s:  subject (IRI or blank node)
    :param Term p:  predicate (IRI)
    :param Term o:  object (any term)
    """

    s: Term
    p: Term
    o: Term

    def __post_init__(self):
        if self.s.kind is TermKind.LITERAL:
            err = f"Literal subject is not allowed: {self.s.n3()}."
            raise ValueError(err)
        if self.p.kind is not TermKind.IRI:
            err = f"Predicate must be an IRI: {self.p.n3()}."
            raise ValueError(err)

    def n3(self) -> str:
        """N-Triples statement line (without the newline)."""
        return f"{self.s.n3()} {self.p.n3()} {self.o.n3()} ."


class AxiomKind(Enum):
    """The four RDFS axiom kinds used by the encoder."""

    SUB_CLASS_OF = RDFS_SUBCLASSOF
    SUB_PROPERTY_OF = RDFS_SUBPROPERTYOF
    DOMAIN = RDFS_DOMAIN
    RANGE = RDFS_RANGE


@dataclass(frozen=True, slots=True)
class SchemaAxiom:
    """A schema axiom relating two IRIs.

    SubClassOf relates two concepts, SubPropertyOf two properties, and
    Domain/Range a property (subject) to a concept (object).
    """

    kind: AxiomKind
    subject: Term
    object: Term

    def __post_init__(self):
        for term in (self.subject, self.object):
            if term.kind is not TermKind.IRI:
                err = f"Axiom terms must be IRIs, got {term.n3()}."
                raise ValueError(err)

    def to_triple(self) -> Triple:
        """Express the axiom as an RDF triple."""
        return Triple(self.subject, Term.iri(self.kind.value), self.object)


def to_rdflib(term):
    """Convert a term to its rdflib counterpart."""
    if term.kind is TermKind.IRI:
        return URIRef(term.lexical)
    if term.kind is TermKind.BLANK_NODE:
        return BNode(term.lexical[2:])
    return Literal(
        term.value,
        lang=term.language,
        datatype=term.datatype,
        normalize=False,
    )


def from_rdflib(node) -> Term:
    """Convert an rdflib node back to a term."""
    if isinstance(node, URIRef):
        return Term.iri(str(node))
    if isinstance(node, BNode):
        return Term.blank(str(node))
    datatype = str(node.datatype) if node.datatype is not None else None
    return Term.literal(str(node), language=node.language, datatype=datatype)
