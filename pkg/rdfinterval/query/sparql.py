"""A SPARQL subset: SELECT over basic graph patterns combined with UNION.

Query text is parsed with rdflib's SPARQL grammar. Supported are
``BASE``/``PREFIX`` declarations, ``SELECT [DISTINCT]`` with a variable
list or ``*``, nested groups, ``UNION`` and the usual abbreviations.
Bare names such as ``Professor`` are read as IRIs relative to the base
(the university namespace unless given). Triple patterns keep their
written order. Anything else is rejected with :class:`QuerySyntaxError`
or :class:`UnsupportedFeatureError`.
"""
import functools
import itertools
import logging
import re
from dataclasses import dataclass, field, replace

from pyparsing import ParseBaseException
from rdflib import BNode, Literal, URIRef, Variable
from rdflib.namespace import OWL, RDF, RDFS, XSD
from rdflib.plugins.sparql.algebra import (
    translatePath,
    translatePName,
    translatePrologue,
    traverse,
)
from rdflib.plugins.sparql.parser import parseQuery
from ..errors import QuerySyntaxError, UnsupportedFeatureError
from ..rdf.terms import RDF_TYPE, Term, from_rdflib


_LOGGER = logging.getLogger(__name__)
DEFAULT_BASE = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#"
DEFAULT_PREFIXES = {
    "rdf": str(RDF),
    "rdfs": str(RDFS),
    "owl": str(OWL),
    "xsd": str(XSD),
}
UNSUPPORTED_PARTS = {
    "OptionalGraphPattern": "OPTIONAL",
    "Filter": "FILTER",
    "MinusGraphPattern": "MINUS",
    "Bind": "BIND",
    "InlineData": "VALUES",
    "GraphGraphPattern": "GRAPH",
    "ServiceGraphPattern": "SERVICE",
    "SubSelect": "Sub-queries",
}
UNSUPPORTED_CLAUSES = {
    "datasetClause": "FROM",
    "groupby": "GROUP BY",
    "having": "HAVING",
    "orderby": "ORDER BY",
    "limitoffset": "LIMIT and OFFSET",
    "valuesClause": "VALUES",
}
SPARQL_WORDS = {
    "AS",
    "ASC",
    "ASK",
    "BASE",
    "BIND",
    "BY",
    "CONSTRUCT",
    "DESC",
    "DESCRIBE",
    "DISTINCT",
    "EXISTS",
    "FALSE",
    "FILTER",
    "FROM",
    "GRAPH",
    "GROUP",
    "HAVING",
    "IN",
    "LIMIT",
    "MINUS",
    "NAMED",
    "NOT",
    "OFFSET",
    "OPTIONAL",
    "ORDER",
    "PREFIX",
    "REDUCED",
    "SELECT",
    "SERVICE",
    "TRUE",
    "UNDEF",
    "UNION",
    "VALUES",
    "WHERE",
}
TOKEN = re.compile(
    r"""
    (?P<iri><[^<>"{}|^`\\\s]*>)
    |(?P<skip>\s+|\#[^\n]*
        |"(?:[^"\\\n\r]|\\.)*"|'(?:[^'\\\n\r]|\\.)*'
        |@[A-Za-z]+(?:-[A-Za-z0-9]+)*
        |[?$]\w+
        |\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
    |(?P<pname>(?:[A-Za-z_][\w\-.]*)?:[\w\-]*(?:\.[\w\-]+)*)
    |(?P<name>[A-Za-z_][\w\-]*)
    |(?P<other>.)
    """,
    re.VERBOSE | re.DOTALL,
)
ABSOLUTE_IRI = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")


@dataclass(frozen=True)
class Var:
    """A query variable (name without the leading ``?``)."""

    name: str

    def __str__(self):
        return f"?{self.name}"


@dataclass(frozen=True)
class Const:
    """A query constant, with its id and namespace once located.

    :param Term term:  constant term
    :param int id:  encoded id (None until located)
    :param namespace:  table that resolved the id
    """

    term: Term
    id: int = None
    namespace: object = None

    def located(self, value, namespace) -> "Const":
        return replace(self, id=value, namespace=namespace)

    def __str__(self):
        return self.term.n3()


@dataclass(frozen=True)
class TriplePattern:
    """One triple pattern of a basic graph pattern.

    :param bool resource_object:  the object must be an IRI or a blank
        node (set on patterns that infer a type for their object)
    :param frozenset literal_ids:  ids of the dataset's literals, attached
        when a ``resource_object`` pattern is located
    """

    s: object
    p: object
    o: object
    resource_object: bool = False
    literal_ids: frozenset = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.p, Const) and not self.p.term.is_iri:
            err = f"Predicate must be a variable or an IRI, got {self.p}."
            raise ValueError(err)
        if isinstance(self.s, Const) and self.s.term.is_literal:
            err = f"Subject cannot be a literal: {self.s}."
            raise ValueError(err)

    def positions(self) -> tuple:
        return (("s", self.s), ("p", self.p), ("o", self.o))

    @property
    def variables(self) -> tuple:
        names = [
            item.name for _, item in self.positions() if isinstance(item, Var)
        ]
        return tuple(dict.fromkeys(names))

    @property
    def is_type(self) -> bool:
        """True for a pattern with the constant predicate rdf:type."""
        return isinstance(self.p, Const) and self.p.term.lexical == RDF_TYPE

    def __str__(self):
        if self.resource_object:
            return (
                f"{self.s} {self.p} {self.o} . "
                f"FILTER (!isLiteral({self.o}))"
            )
        return f"{self.s} {self.p} {self.o} ."


@dataclass(frozen=True)
class Disjunction:
    """Alternatives for one pattern, the original pattern first.

    Only the variables of the original pattern (``visible``) are bound
    outside; variables introduced by an alternative stay local to it.
    """

    alternatives: tuple
    visible: tuple = None

    def __post_init__(self):
        if not self.alternatives:
            err = "A disjunction needs at least one alternative."
            raise ValueError(err)
        if self.visible is None:
            object.__setattr__(self, "visible", self.alternatives[0].variables)

    @property
    def variables(self) -> tuple:
        return self.visible

    def __str__(self):
        return " UNION ".join(
            f"{{ {pattern} }}" for pattern in self.alternatives
        )


@dataclass(frozen=True)
class Query:
    """A SELECT query.

    :param tuple projection:  projected variable names
    :param tuple branches:  UNION branches, each a tuple of patterns (or
        :class:`Disjunction` elements) forming a conjunction
    :param bool distinct:  DISTINCT was requested
    :param frozenset empty_branches:  indexes of branches known to match
        nothing (set when a constant cannot be located)
    """

    projection: tuple
    branches: tuple
    distinct: bool = False
    empty_branches: frozenset = frozenset()

    def __post_init__(self):
        if not self.branches:
            err = "A query needs at least one graph pattern."
            raise ValueError(err)
        for ibranch, branch in enumerate(self.branches):
            found = set(branch_variables(branch))
            missing = [name for name in self.projection if name not in found]
            if missing:
                err = (
                    f"Projected variable ?{missing[0]} does not occur in "
                    f"UNION branch {ibranch + 1}."
                )
                raise ValueError(err)

    def to_sparql(self) -> str:
        """Render the query as SPARQL text with full IRIs."""
        head = "SELECT DISTINCT" if self.distinct else "SELECT"
        variables = " ".join(f"?{name}" for name in self.projection)
        groups = []
        for branch in self.branches:
            body = " ".join(
                f"{{ {element} }}"
                if isinstance(element, Disjunction)
                else str(element)
                for element in branch
            )
            groups.append(f"{{ {body} }}")
        if len(groups) == 1:
            where = groups[0]
        else:
            where = "{ " + " UNION ".join(groups) + " }"
        return f"{head} {variables} WHERE {where}"


def branch_variables(branch) -> tuple:
    """Variables of a conjunction in order of first occurrence."""
    names = itertools.chain.from_iterable(
        element.variables for element in branch
    )
    return tuple(dict.fromkeys(names))




@dataclass
class _Source:
    """Query text with bare names spelled out as IRIs.

    :param str text:  rewritten text handed to the SPARQL grammar
    :param list edits:  ``(new_start, new_end, start, end)`` per rewrite
    :param list pnames:  ``(prefix, position)`` of each prefixed name
    :param int select:  position of SELECT in the original text
    :param int group:  position of the first ``{`` in the original text
    """

    text: str
    edits: list
    pnames: list
    select: int = 0
    group: int = 0

    def original_position(self, position) -> int:
        """Map a position in the rewritten text back to the input."""
        shift = 0
        for new_start, new_end, start, end in self.edits:
            if position < new_start:
                break
            if position < new_end:
                return start
            shift = end - new_end
        return position + shift


def _expand_names(text, base) -> _Source:
    """Replace bare names and relative IRIs by ``<base + name>`` IRIs.

    Keywords, ``a``, variables, prefixed names, strings, numbers and
    comments are left alone. A ``BASE`` declaration changes the base for
    the names after it.
    """
    pieces = []
    source = _Source("", [], [], select=-1, group=-1)
    length = 0
    after_base = False
    for match in TOKEN.finditer(text):
        kind, piece = match.lastgroup, match.group()
        name = None
        if kind == "iri":
            if not ABSOLUTE_IRI.match(piece[1:-1]):
                name = piece[1:-1]
        elif kind == "pname":
            source.pnames.append((piece.partition(":")[0], match.start()))
        elif kind == "name":
            word = piece.upper()
            if word == "SELECT" and source.select < 0:
                source.select = match.start()
            if piece != "a" and word not in SPARQL_WORDS:
                name = piece
        elif piece == "{" and source.group < 0:
            source.group = match.start()
        if name is not None:
            piece = f"<{base}{name}>"
            source.edits.append(
                (length, length + len(piece), match.start(), match.end())
            )
        if kind == "iri" and after_base:
            base = piece[1:-1]
        if kind != "skip":
            after_base = kind == "name" and piece.upper() == "BASE"
        pieces.append(piece)
        length += len(piece)
    source.text = "".join(pieces)
    source.select = max(source.select, 0)
    source.group = max(source.group, 0)
    return source


def _term(node):
    """Convert a parse-tree node to a query term."""
    if isinstance(node, Variable):
        return Var(str(node))
    if isinstance(node, BNode):
        err = "Blank nodes in queries are not supported."
        raise UnsupportedFeatureError(err)
    if isinstance(node, (URIRef, Literal)):
        return Const(from_rdflib(node))
    err = f"Property paths are not supported: {node}."
    raise UnsupportedFeatureError(err)


class _TreeReader:
    """Builds a :class:`Query` from an rdflib SPARQL parse tree."""

    def __init__(self, source):
        self.source = source

    def fail(self, position, reason):
        raise QuerySyntaxError(position, reason)

    def read(self, tree) -> Query:
        if tree.name != "SelectQuery":
            kind = tree.name.removesuffix("Query").upper()
            err = f"{kind} queries are not supported."
            raise UnsupportedFeatureError(err)
        for clause, label in UNSUPPORTED_CLAUSES.items():
            if getattr(tree, clause):
                err = f"{label} is not supported."
                raise UnsupportedFeatureError(err)
        projection = []
        for item in tree.projection or ():
            if item.var is None:
                err = "Projection expressions are not supported."
                raise UnsupportedFeatureError(err)
            projection.append(str(item.var))
        branches = self.group(tree.where)
        if not projection:
            projection = list(
                dict.fromkeys(
                    itertools.chain.from_iterable(
                        branch_variables(branch) for branch in branches
                    )
                )
            )
        for ibranch, branch in enumerate(branches):
            found = set(branch_variables(branch))
            for name in projection:
                if name not in found:
                    err = (
                        f"Projected variable ?{name} does not occur in "
                        f"UNION branch {ibranch + 1}."
                    )
                    self.fail(self.source.select, err)
        distinct = tree.modifier == "DISTINCT"
        return Query(tuple(projection), tuple(branches), distinct)

    def group(self, pattern) -> list:
        """Read a group graph pattern into its conjunctive branches."""
        if pattern.name in UNSUPPORTED_PARTS:
            err = f"{UNSUPPORTED_PARTS[pattern.name]} is not supported."
            raise UnsupportedFeatureError(err)
        elements = []
        for part in pattern.part or ():
            if part.name == "TriplesBlock":
                elements.extend([(item,)] for item in self.triples(part))
            elif part.name == "GroupOrUnionGraphPattern":
                elements.append(
                    list(
                        itertools.chain.from_iterable(
                            self.group(graph) for graph in part.graph
                        )
                    )
                )
            else:
                label = UNSUPPORTED_PARTS.get(part.name, part.name)
                err = f"{label} is not supported."
                raise UnsupportedFeatureError(err)
        branches = [()]
        for alternatives in elements:
            branches = [
                left + right for left in branches for right in alternatives
            ]
        return branches

    def triples(self, block) -> list:
        """Triple patterns of a block in written order."""
        nodes = list(itertools.chain.from_iterable(block.triples))
        patterns = []
        for index in range(0, len(nodes), 3):
            s, p, o = (_term(node) for node in nodes[index : index + 3])
            try:
                patterns.append(TriplePattern(s, p, o))
            except ValueError as error:
                self.fail(self.source.group, str(error))
        return patterns


def parse_query(text, base=None, prefixes=None) -> Query:
    """Parse query text.

    :param str text:  query in the supported SPARQL subset
    :param str base:  IRI for bare names and relative IRIs (default: the
        university namespace)
    :param dict prefixes:  extra prefix declarations
    :returns:  parsed query
    :raises QuerySyntaxError:  on text outside the grammar
    :raises UnsupportedFeatureError:  on OPTIONAL, FILTER and friends
    """
    base = base or DEFAULT_BASE
    source = _expand_names(text, base)
    try:
        parsed = parseQuery(source.text)
    except ParseBaseException as error:
        position = source.original_position(error.loc)
        raise QuerySyntaxError(position, f"Invalid query: {error.msg}.")
    namespaces = dict(DEFAULT_PREFIXES)
    namespaces.update(prefixes or {})
    prologue = translatePrologue(parsed[0], base, initNs=namespaces)
    try:
        tree = traverse(
            parsed[1],
            visitPost=functools.partial(translatePName, prologue=prologue),
        )
    except Exception as error:
        store = prologue.namespace_manager.store
        for prefix, position in source.pnames:
            if store.namespace(prefix) is None:
                err = f"Unknown prefix {prefix!r}."
                raise QuerySyntaxError(position, err)
        raise QuerySyntaxError(0, str(error))
    if tree.where is not None:
        tree["where"] = traverse(tree.where, visitPost=translatePath)
    query = _TreeReader(source).read(tree)
    _LOGGER.debug(
        f"Parsed query with {len(query.branches)} branches projecting "
        f"{len(query.projection)} variables."
    )
    return query
