"""Interval-compatible codes for concept and property hierarchies.

Each entity receives a bit vector whose prefix is the code of its
canonical parent. A hierarchy of N direct children under an entity uses a
local segment of ``N.bit_length()`` (= ceil(log2(N + 1))) bits, the root
uses a single 0 bit, and every code is left-aligned and zero-padded to the
common width. Subsumption then reduces to ``c <= b < bound(c)``.

Non-tree subsumption pairs (multiple inheritance) are kept in a small
side table of residual pairs that widens the interval test.
"""
import bisect
import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
import networkx as nx
from .config import MAX_CODE_WIDTH
from .errors import (
    EmptyHierarchyError,
    FormatError,
    SchemaError,
    UnknownEntityError,
    WidthOverflowError,
)
from .rdf.terms import RDF_TYPE, OWL_THING, TOP_PROPERTY, AxiomKind


_LOGGER = logging.getLogger(__name__)


class EntityKind(Enum):
    """The two encoded hierarchies."""

    CONCEPT = "concept"
    PROPERTY = "property"


ROOTS = {EntityKind.CONCEPT: OWL_THING, EntityKind.PROPERTY: TOP_PROPERTY}
SUB_AXIOMS = {
    EntityKind.CONCEPT: AxiomKind.SUB_CLASS_OF,
    EntityKind.PROPERTY: AxiomKind.SUB_PROPERTY_OF,
}


@dataclass(frozen=True, slots=True)
class EntityCode:
    """Code of one entity and its placement in the bit vector.

    :param int value:  code as an unsigned integer of ``code_length`` bits
    :param int start:  offset (from the most significant bit) of the local
        segment
    :param int local_length:  number of bits in the local segment
    :param int code_length:  total width shared by the table
    """

    value: int
    start: int
    local_length: int
    code_length: int

    def __post_init__(self):
        if self.start < 0 or self.start + self.local_length > self.code_length:
            err = (
                f"Segment [{self.start}, {self.start + self.local_length}) "
                f"does not fit in {self.code_length} bits."
            )
            raise ValueError(err)
        padded = self.value >> self.shift << self.shift
        if self.value < 0 or padded != self.value:
            err = f"Code {self.value} has non-zero padding bits."
            raise ValueError(err)
        if self.value >= 1 << self.code_length:
            err = f"Code {self.value} exceeds {self.code_length} bits."
            raise ValueError(err)

    @property
    def shift(self) -> int:
        """Number of padding bits to the right of the local segment."""
        return self.code_length - (self.start + self.local_length)

    @property
    def prefix_length(self) -> int:
        return self.start + self.local_length

    def bits(self) -> str:
        """Bit string split into prefix, local segment and padding."""
        text = format(self.value, f"0{self.code_length}b")
        end = self.prefix_length
        parts = (text[: self.start], text[self.start : end], text[end:])
        return " ".join(part for part in parts if part)


def bound(code) -> int:
    """Exclusive upper end of an entity's subsumption interval.

    :param EntityCode code:  code with zero right padding
    :returns:  ``((value >> shift) + 1) << shift``
    """
    shift = code.shift
    return ((code.value >> shift) + 1) << shift


def is_descendant_or_self(b, c, residual=frozenset()) -> bool:
    """Test ``b`` subsumed by ``c`` with one interval comparison.

    :param int b:  code value of the candidate descendant
    :param EntityCode c:  code of the candidate ancestor
    :param residual:  residual (descendant, ancestor) pairs of the table
    :returns:  True if ``c.value <= b < bound(c)`` or the pair is residual
    """
    return c.value <= b < bound(c) or (b, c.value) in residual


@dataclass
class CodeTable:
    """Code table of one hierarchy.

    Members of a collapsed cycle share one code; ``by_value`` maps a code
    to the first declared member.

    :param EntityKind kind:  concept or property hierarchy
    :param int code_length:  common width in bits
    :param dict by_label:  IRI to code
    :param dict by_value:  code value to IRI
    """

    kind: EntityKind
    code_length: int
    by_label: dict
    by_value: dict
    _sorted: list = field(
        default=None, init=False, repr=False, compare=False
    )

    root_value = 0

    @property
    def root(self) -> str:
        return self.by_value[self.root_value]

    def __len__(self):
        return len(self.by_value)

    def __contains__(self, iri):
        return iri in self.by_label

    def code(self, iri) -> EntityCode:
        """Code of an IRI.

        :raises UnknownEntityError:  if the IRI has no code
        """
        try:
            return self.by_label[iri]
        except KeyError:
            err = f"No {self.kind.value} code for <{iri}>."
            raise UnknownEntityError(err)

    def code_of(self, value) -> EntityCode:
        """Code record for a code value.

        :raises UnknownEntityError:  if no entity has this value
        """
        try:
            return self.by_label[self.by_value[value]]
        except KeyError:
            err = f"No {self.kind.value} with code {value}."
            raise UnknownEntityError(err)

    def sorted_values(self) -> list:
        if self._sorted is None:
            self._sorted = sorted(self.by_value)
        return self._sorted

    def interval_values(self, code) -> list:
        """All code values inside the interval of ``code`` (itself first)."""
        values = self.sorted_values()
        low = bisect.bisect_left(values, code.value)
        high = bisect.bisect_left(values, bound(code))
        return values[low:high]

    def tree_ancestors(self, value) -> list:
        """Values of the canonical-parent chain, from ``value`` to the root.

        The parent's code is the child's code with every bit from the
        child's local segment onwards cleared.
        """
        chain = [value]
        code = self.code_of(value)
        while code.start > 0:
            shift = self.code_length - code.start
            value = value >> shift << shift
            chain.append(value)
            code = self.code_of(value)
        return chain


def residual_index(residual) -> tuple:
    """Index residual pairs both ways.

    :param residual:  set of (descendant, ancestor) pairs
    :returns:  (ancestor -> descendants, descendant -> ancestors) dicts
    """
    down = defaultdict(set)
    up = defaultdict(set)
    for descendant, ancestor in residual:
        down[ancestor].add(descendant)
        up[descendant].add(ancestor)
    return dict(down), dict(up)


def _collect_entities(axioms, kind, entities) -> tuple:
    """Gather entities of one kind in order of first appearance.

    :returns:  (order dict IRI -> index, list of (child, parent) edges)
    """
    sub_kind = SUB_AXIOMS[kind]
    order = {}
    edges = []
    for axiom in axioms:
        if axiom.kind is sub_kind:
            child, parent = axiom.subject.lexical, axiom.object.lexical
            order.setdefault(child, len(order))
            order.setdefault(parent, len(order))
            edges.append((child, parent))
        elif axiom.kind in (AxiomKind.DOMAIN, AxiomKind.RANGE):
            if kind is EntityKind.PROPERTY:
                order.setdefault(axiom.subject.lexical, len(order))
            else:
                order.setdefault(axiom.object.lexical, len(order))
    for iri in entities:
        order.setdefault(iri, len(order))
    return order, edges


def assign_codes(
    axioms, kind, entities=(), max_width=MAX_CODE_WIDTH, leading=()
) -> tuple:
    """Assign interval codes to one hierarchy.

    Subsumption cycles are collapsed to one code. The canonical parent of
    an entity is the parent named by its first sub-entity axiom; entities
    without one hang directly below the root. Siblings are numbered 1..N
    in the order of their first sub-entity axiom (then first mention).

    :param list axioms:  schema axioms
    :param EntityKind kind:  hierarchy to encode
    :param entities:  extra IRIs (e.g. found only in instance data)
    :param int max_width:  maximum code width in bits
    :param leading:  IRIs numbered first among the root children when
        they have no parent of their own
    :returns:  (CodeTable, frozenset of residual (descendant, ancestor)
        code pairs)
    :raises EmptyHierarchyError:  if there is nothing to encode
    :raises WidthOverflowError:  if codes need more than ``max_width`` bits
    """
    root = ROOTS[kind]
    leading = tuple(leading)
    order, edges = _collect_entities(axioms, kind, [*leading, *entities])
    if not order:
        err = f"The {kind.value} hierarchy has no entities."
        raise EmptyHierarchyError(err)
    graph = nx.DiGraph()
    graph.add_node(root)
    graph.add_nodes_from(order)
    graph.add_edges_from((c, p) for c, p in edges if c != p)
    graph.add_edges_from((node, root) for node in order if node != root)
    leader = {}
    for component in nx.strongly_connected_components(graph):
        if root in component:
            head = root
        else:
            head = min(component, key=order.__getitem__)
        if len(component) > 1:
            _LOGGER.info(
                f"Collapsing {len(component)} equivalent {kind.value} "
                f"entities into <{head}>."
            )
        for member in component:
            leader[member] = head
    dag = nx.DiGraph()
    dag.add_nodes_from(set(leader.values()))
    parent_of = {}
    first_edge = {}
    for index, (child, parent) in enumerate(edges):
        child, parent = leader[child], leader[parent]
        if child == parent:
            continue
        dag.add_edge(child, parent)
        if child not in parent_of:
            parent_of[child] = parent
            first_edge[child] = index
    children = defaultdict(list)
    for node in sorted(
        (node for node in dag if node != root),
        key=lambda node: (
            -1 if node in leading else first_edge.get(node, len(edges)),
            order[node],
        ),
    ):
        children[parent_of.get(node, root)].append(node)

    prefix = {root: 0}
    placement = {root: (0, 1)}
    tree_ancestors = {root: {root}}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        kids = children.get(node, [])
        if not kids:
            continue
        width = len(kids).bit_length()
        start, local = placement[node]
        for index, kid in enumerate(kids, start=1):
            prefix[kid] = (prefix[node] << width) | index
            placement[kid] = (start + local, width)
            tree_ancestors[kid] = tree_ancestors[node] | {kid}
            queue.append(kid)
    code_length = max(start + local for start, local in placement.values())
    if code_length > max_width:
        err = (
            f"The {kind.value} hierarchy needs {code_length} bits, more "
            f"than the maximum of {max_width}."
        )
        raise WidthOverflowError(err)
    codes = {}
    for node, (start, local) in placement.items():
        value = prefix[node] << (code_length - start - local)
        codes[node] = EntityCode(value, start, local, code_length)
    by_label = {member: codes[head] for member, head in leader.items()}
    by_value = {code.value: node for node, code in codes.items()}
    residual = set()
    for node in dag:
        for ancestor in nx.descendants(dag, node):
            if ancestor != root and ancestor not in tree_ancestors[node]:
                residual.add((codes[node].value, codes[ancestor].value))
    table = CodeTable(kind, code_length, by_label, by_value)
    _LOGGER.info(
        f"Encoded {len(by_value)} {kind.value} codes over {code_length} bits "
        f"({len(residual)} residual pairs)."
    )
    return table, frozenset(residual)


def build_domain_range_maps(axioms, properties, concepts) -> tuple:
    """Build the domain and range maps.

    :param list axioms:  schema axioms
    :param CodeTable properties:  property codes
    :param CodeTable concepts:  concept codes
    :returns:  (domain map, range map), each property id -> frozenset of
        concept ids; properties without axioms are absent
    :raises UnknownEntityError:  if an axiom references an un-encoded IRI
    """
    maps = {
        AxiomKind.DOMAIN: defaultdict(set),
        AxiomKind.RANGE: defaultdict(set),
    }
    for axiom in axioms:
        if axiom.kind not in maps:
            continue
        prop = properties.code(axiom.subject.lexical).value
        concept = concepts.code(axiom.object.lexical).value
        maps[axiom.kind][prop].add(concept)
    domain_map, range_map = (
        {key: frozenset(values) for key, values in maps[kind].items()}
        for kind in (AxiomKind.DOMAIN, AxiomKind.RANGE)
    )
    return domain_map, range_map


@dataclass
class TBoxEncoding:
    """Codes, domain/range maps and residual pairs of a schema.

    Immutable after construction and safe to share between threads.
    """

    concepts: CodeTable
    properties: CodeTable
    domain_map: dict
    range_map: dict
    concept_residual: frozenset = frozenset()
    property_residual: frozenset = frozenset()
    _index: dict = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    @property
    def type_id(self) -> int:
        """Code of rdf:type."""
        return self.properties.code(RDF_TYPE).value

    def table(self, kind) -> CodeTable:
        if kind is EntityKind.CONCEPT:
            return self.concepts
        return self.properties

    def residual(self, kind) -> frozenset:
        if kind is EntityKind.CONCEPT:
            return self.concept_residual
        return self.property_residual

    def _residual_index(self, kind) -> tuple:
        if kind not in self._index:
            self._index[kind] = residual_index(self.residual(kind))
        return self._index[kind]

    def residual_descendants(self, kind, value) -> frozenset:
        """Descendants of ``value`` that only the residual table captures."""
        down, _ = self._residual_index(kind)
        return frozenset(down.get(value, ()))

    def subsumes(self, kind, descendant, ancestor) -> bool:
        """Test ``descendant`` subsumed by ``ancestor`` (code values)."""
        code = self.table(kind).code_of(ancestor)
        return is_descendant_or_self(descendant, code, self.residual(kind))

    def descendants(self, kind, value) -> list:
        """Every descendant-or-self code of ``value``, itself first.

        :param EntityKind kind:  hierarchy
        :param int value:  ancestor code
        :returns:  interval members in code order, then residual members
        """
        table = self.table(kind)
        found = table.interval_values(table.code_of(value))
        extra = sorted(self.residual_descendants(kind, value) - set(found))
        return found + extra

    def ancestors(self, kind, value, include_root=False) -> list:
        """Every ancestor-or-self code of ``value``.

        :param EntityKind kind:  hierarchy
        :param int value:  descendant code
        :param bool include_root:  keep the virtual root
        :returns:  list starting with ``value``
        """
        chain = self.table(kind).tree_ancestors(value)
        _, up = self._residual_index(kind)
        extra = sorted(up.get(value, set()) - set(chain))
        found = chain + extra
        if not include_root:
            found = [
                item
                for item in found
                if item != CodeTable.root_value or item == value
            ]
        return found

    def effective_domains(self, prop) -> frozenset:
        """Domain concepts of a property, including its super-properties."""
        return self._effective(prop, self.domain_map)

    def effective_ranges(self, prop) -> frozenset:
        """Range concepts of a property, including its super-properties."""
        return self._effective(prop, self.range_map)

    def _effective(self, prop, mapping) -> frozenset:
        found = set()
        for ancestor in self.ancestors(EntityKind.PROPERTY, prop, True):
            found |= mapping.get(ancestor, frozenset())
        return frozenset(found)


def encode_tbox(
    axioms, concepts=(), properties=(), max_width=MAX_CODE_WIDTH
) -> TBoxEncoding:
    """Encode a schema.

    rdf:type is always a direct child of the property root. IRIs passed in
    ``concepts`` and ``properties`` (schema terms discovered in instance
    data) become direct children of the root unless an axiom places them.

    :param list axioms:  schema axioms (an already classified hierarchy)
    :param concepts:  extra concept IRIs
    :param properties:  extra property IRIs
    :param int max_width:  maximum code width in bits
    :returns:  TBox encoding
    :raises SchemaError:  if rdf:type takes part in a sub-property axiom
    """
    axioms = list(axioms)
    for axiom in axioms:
        if axiom.kind is AxiomKind.SUB_PROPERTY_OF and RDF_TYPE in (
            axiom.subject.lexical,
            axiom.object.lexical,
        ):
            err = (
                f"rdf:type cannot take part in a sub-property axiom: "
                f"{axiom.subject.n3()} rdfs:subPropertyOf {axiom.object.n3()}"
            )
            raise SchemaError(err)
    concept_table, concept_residual = assign_codes(
        axioms, EntityKind.CONCEPT, concepts, max_width
    )
    property_table, property_residual = assign_codes(
        axioms, EntityKind.PROPERTY, properties, max_width, leading=[RDF_TYPE]
    )
    domain_map, range_map = build_domain_range_maps(
        axioms, property_table, concept_table
    )
    _LOGGER.info(
        f"Built {len(domain_map)} domain and {len(range_map)} range entries."
    )
    return TBoxEncoding(
        concept_table,
        property_table,
        domain_map,
        range_map,
        concept_residual,
        property_residual,
    )


def _table_lines(table) -> list:
    lines = [f"{table.kind.value} {table.code_length}"]
    members = defaultdict(list)
    for iri, code in table.by_label.items():
        if table.by_value[code.value] != iri:
            members[code.value].append(iri)
    for value in table.sorted_values():
        code = table.code_of(value)
        for iri in [table.by_value[value], *members[value]]:
            lines.append(
                f"{value} {code.start} {code.local_length} <{iri}>"
            )
    return lines


def serialize_tbox(tbox) -> str:
    """Serialize a TBox encoding as line-oriented text.

    Layout: a ``concept <width>`` header followed by one
    ``value start localLength <IRI>`` line per entity, the same for
    ``property``, then ``domain`` and ``range`` sections of
    ``propertyId conceptId,conceptId`` lines and ``residual concept`` /
    ``residual property`` sections of ``descendantId ancestorId`` lines.

    :param TBoxEncoding tbox:  encoding to write
    :returns:  text
    """
    lines = _table_lines(tbox.concepts) + _table_lines(tbox.properties)
    sections = (("domain", tbox.domain_map), ("range", tbox.range_map))
    for name, mapping in sections:
        lines.append(name)
        for prop in sorted(mapping):
            concepts = ",".join(str(value) for value in sorted(mapping[prop]))
            lines.append(f"{prop} {concepts}")
    for kind in EntityKind:
        lines.append(f"residual {kind.value}")
        for descendant, ancestor in sorted(tbox.residual(kind)):
            lines.append(f"{descendant} {ancestor}")
    return "\n".join(lines) + "\n"


def load_tbox(data) -> TBoxEncoding:
    """Parse text written by :func:`serialize_tbox`.

    :param data:  text or UTF-8 bytes
    :returns:  TBox encoding
    :raises FormatError:  on corrupt input
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    tables = {}
    maps = {"domain": {}, "range": {}}
    residuals = {kind: set() for kind in EntityKind}
    section = None
    for line_number, line in enumerate(data.splitlines(), start=1):
        words = line.split()
        if not words:
            continue
        try:
            if words[0] in ("concept", "property") and len(words) == 2:
                kind = EntityKind(words[0])
                section = (kind, int(words[1]))
                tables[kind] = CodeTable(kind, int(words[1]), {}, {})
            elif words[0] in maps and len(words) == 1:
                section = words[0]
            elif words[0] == "residual" and len(words) == 2:
                section = ("residual", EntityKind(words[1]))
            elif isinstance(section, tuple) and section[0] == "residual":
                descendant, ancestor = (int(word) for word in words)
                residuals[section[1]].add((descendant, ancestor))
            elif isinstance(section, tuple):
                kind, width = section
                value, start, local = (int(word) for word in words[:3])
                iri = line.split(maxsplit=3)[3]
                if not (iri.startswith("<") and iri.endswith(">")):
                    raise ValueError(f"bad IRI {iri}")
                iri = iri[1:-1]
                tables[kind].by_label[iri] = EntityCode(
                    value, start, local, width
                )
                tables[kind].by_value.setdefault(value, iri)
            elif section in maps:
                prop, concepts = words
                maps[section][int(prop)] = frozenset(
                    int(value) for value in concepts.split(",")
                )
            else:
                raise ValueError("unexpected line")
        except (ValueError, IndexError) as error:
            err = f"TBox line {line_number}: {error}: {line!r}"
            raise FormatError(err)
    if set(tables) != set(EntityKind):
        err = "TBox encoding is missing a code table."
        raise FormatError(err)
    for table in tables.values():
        if table.root_value not in table.by_value:
            err = f"The {table.kind.value} table has no root code."
            raise FormatError(err)
    return TBoxEncoding(
        tables[EntityKind.CONCEPT],
        tables[EntityKind.PROPERTY],
        maps["domain"],
        maps["range"],
        frozenset(residuals[EntityKind.CONCEPT]),
        frozenset(residuals[EntityKind.PROPERTY]),
    )
