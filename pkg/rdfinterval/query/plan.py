"""Translate located queries into physical plans.

Under entailment every constant predicate becomes one interval test on the
predicate column and every rdf:type constant one interval test on the
object column; both are widened by the residual descendants of the
constant. Conjunctions become left-deep hash joins in written order and
UNION branches a union of per-branch projections.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, replace
import numpy as np
from ..dataset import Namespace, locate
from ..errors import NotFoundError, PlanError
from ..hierarchy import EntityKind, bound
from .sparql import Const, Disjunction, TriplePattern, Var


_LOGGER = logging.getLogger(__name__)
UINT64_LIMIT = 1 << 64
#: namespace of a column whose ids are concepts on rdf:type rows and
#: individuals elsewhere; a companion flag column tells them apart
MIXED = None
FLAG_SUFFIX = "#concept"


def flag_column(variable) -> str:
    """Name of the column flagging concept ids of a mixed variable."""
    return f"{variable}{FLAG_SUFFIX}"


@dataclass(frozen=True)
class Equals:
    column: str
    value: int

    comparisons = 1

    def mask(self, values) -> np.ndarray:
        return (values == self.value).to_numpy(dtype=bool)


@dataclass(frozen=True)
class NotEquals:
    column: str
    value: int

    comparisons = 1

    def mask(self, values) -> np.ndarray:
        return (values != self.value).to_numpy(dtype=bool)


@dataclass(frozen=True)
class InInterval:
    """``low <= value < high``, or membership in ``extras``.

    :param str column:  triple column
    :param int low:  code of the hierarchy constant
    :param int high:  its bound
    :param frozenset extras:  residual descendants outside the interval
    """

    column: str
    low: int
    high: int
    extras: frozenset = frozenset()

    @property
    def comparisons(self) -> int:
        return 3 if self.extras else 2

    def mask(self, values) -> np.ndarray:
        selected = (values >= self.low).to_numpy(dtype=bool)
        # 2**64 overflows a uint64 comparison; stored values are below it
        if not (values.dtype == np.uint64 and self.high >= UINT64_LIMIT):
            selected &= (values < self.high).to_numpy(dtype=bool)
        if self.extras:
            selected |= values.isin(list(self.extras)).to_numpy(dtype=bool)
        return selected


@dataclass(frozen=True)
class IsIn:
    """Membership in an explicit set of ids (one hash lookup per row)."""

    column: str
    values: frozenset

    comparisons = 1

    def mask(self, values) -> np.ndarray:
        return values.isin(list(self.values)).to_numpy(dtype=bool)


@dataclass(frozen=True)
class NotLiteral:
    """Excludes the literal ids of the dataset from a column."""

    column: str
    literal_ids: frozenset

    comparisons = 1

    def mask(self, values) -> np.ndarray:
        return ~values.isin(list(self.literal_ids)).to_numpy(dtype=bool)

    def __str__(self):
        return f"NotLiteral({self.column!r})"


@dataclass(frozen=True)
class IntervalScan:
    """Filter the triples of every partition and bind variables.

    :param TriplePattern pattern:  located pattern
    :param tuple predicates:  filters applied to each triple
    :param tuple outputs:  (variable, triple column) bindings
    :param tuple same:  pairs of columns bound to one variable
    :param tuple flags:  variables getting a concept flag column
    :param int type_id:  rdf:type id (for flag columns)
    :param bool expand:  replace the object concept by all its ancestors
    """

    pattern: TriplePattern
    predicates: tuple = ()
    outputs: tuple = ()
    same: tuple = ()
    flags: tuple = ()
    type_id: int = None
    expand: bool = False

    @property
    def columns(self) -> tuple:
        variables = tuple(name for name, _ in self.outputs)
        return variables + tuple(flag_column(name) for name in self.flags)


@dataclass(frozen=True)
class HashJoin:
    """Join on every shared column; a cross product when there is none."""

    left: object
    right: object
    keys: tuple

    @property
    def columns(self) -> tuple:
        extra = tuple(
            name for name in self.right.columns if name not in self.keys
        )
        return self.left.columns + extra


@dataclass(frozen=True)
class Union:
    branches: tuple

    @property
    def columns(self) -> tuple:
        return self.branches[0].columns


@dataclass(frozen=True)
class Project:
    """Keep ``variables`` (plus flag columns of ``flag_vars``).

    :param tuple constant_flags:  (variable, is_concept) for flag columns
        the child does not produce
    """

    child: object
    variables: tuple
    flag_vars: tuple = ()
    constant_flags: tuple = ()

    @property
    def columns(self) -> tuple:
        flags = tuple(flag_column(name) for name in self.flag_vars)
        return self.variables + flags


@dataclass(frozen=True)
class Empty:
    """A branch known to produce no rows."""

    columns: tuple


@dataclass(frozen=True)
class PhysicalPlan:
    """Plan tree plus what is needed to decode its results.

    :param root:  plan tree
    :param tuple projection:  projected variables
    :param tuple namespaces:  (variable, Namespace or MIXED) pairs
    :param bool distinct:  remove duplicate rows
    """

    root: object
    projection: tuple
    namespaces: tuple
    distinct: bool = False

    def namespace(self, variable):
        return dict(self.namespaces)[variable]


def _position_namespace(pattern, position) -> Namespace:
    if position == "p":
        return Namespace.PROPERTY
    if position == "o" and pattern.is_type:
        return Namespace.CONCEPT
    return Namespace.INDIVIDUAL


def _locate_pattern(pattern, ds) -> TriplePattern:
    items = {}
    for position, item in pattern.positions():
        if isinstance(item, Const):
            value, namespace = locate(
                item.term, ds, _position_namespace(pattern, position)
            )
            item = item.located(value, namespace)
        items[position] = item
    if pattern.resource_object:
        items["literal_ids"] = ds.individuals.literal_ids()
    return replace(pattern, **items)


def _locate_element(element, ds):
    if isinstance(element, TriplePattern):
        return _locate_pattern(element, ds)
    alternatives = []
    for pattern in element.alternatives:
        try:
            alternatives.append(_locate_pattern(pattern, ds))
        except NotFoundError:
            continue
    if not alternatives:
        err = f"No alternative of {element} can be located."
        raise NotFoundError(err)
    return Disjunction(tuple(alternatives), element.visible)


def locate_query(query, ds):
    """Attach ids to every constant of a query.

    Predicates are looked up as properties, objects of rdf:type as concepts
    and all other constants as individuals. A branch with a constant that
    cannot be located matches nothing and is marked empty.

    :param Query query:  parsed query
    :param EncodedDataset ds:  dataset
    :returns:  query with located constants
    """
    empty = set(query.empty_branches)
    branches = []
    for ibranch, branch in enumerate(query.branches):
        try:
            branch = tuple(_locate_element(element, ds) for element in branch)
        except NotFoundError as error:
            _LOGGER.debug(f"Branch {ibranch + 1} is empty: {error}")
            empty.add(ibranch)
        branches.append(branch)
    return replace(
        query, branches=tuple(branches), empty_branches=frozenset(empty)
    )


def _patterns(elements):
    for element in elements:
        if isinstance(element, Disjunction):
            yield from element.alternatives
        else:
            yield element


class _PlanBuilder:
    def __init__(self, tbox, entailment):
        self.tbox = tbox
        self.entailment = entailment and tbox is not None
        self.type_id = tbox.type_id if tbox is not None else None

    def occurrence_namespace(self, pattern, position):
        if self.tbox is None:
            return Namespace.INDIVIDUAL
        if position == "o" and isinstance(pattern.p, Var):
            return MIXED
        return _position_namespace(pattern, position)

    def branch_namespaces(self, elements) -> dict:
        """Namespace of every variable of a conjunction.

        A variable in an ``?s ?p ?o`` object position takes the namespace
        fixed by its other occurrences, if any.

        :raises PlanError:  if a variable is used in two namespaces
        """
        found = defaultdict(set)
        for pattern in _patterns(elements):
            for position, item in pattern.positions():
                if isinstance(item, Var):
                    space = self.occurrence_namespace(pattern, position)
                    found[item.name].add(space)
        resolved = {}
        for name, spaces in found.items():
            fixed = spaces - {MIXED}
            if len(fixed) > 1:
                used = " and ".join(sorted(space.value for space in fixed))
                err = f"Variable ?{name} is used as {used}."
                raise PlanError(err)
            resolved[name] = fixed.pop() if fixed else MIXED
        return resolved

    def constant_predicate(self, pattern, position, const, exact):
        if const.id is None:
            err = f"Constant {const} was not located before planning."
            raise PlanError(err)
        if exact or not self.entailment:
            return Equals(position, const.id)
        if position == "p" and const.id != self.type_id:
            code = self.tbox.properties.code_of(const.id)
            extras = self.tbox.residual_descendants(
                EntityKind.PROPERTY, const.id
            )
            return InInterval("p", code.value, bound(code), extras)
        if position == "o" and pattern.is_type:
            code = self.tbox.concepts.code_of(const.id)
            extras = self.tbox.residual_descendants(
                EntityKind.CONCEPT, const.id
            )
            return InInterval("o", code.value, bound(code), extras)
        return Equals(position, const.id)

    def scan(self, pattern, namespaces, exact=False) -> IntervalScan:
        predicates = []
        flags = ()
        s, p, o = pattern.s, pattern.p, pattern.o
        if self.tbox is not None and isinstance(p, Var):
            if isinstance(o, Const):
                predicates.append(NotEquals("p", self.type_id))
            elif namespaces[o.name] is Namespace.CONCEPT:
                predicates.append(Equals("p", self.type_id))
            elif namespaces[o.name] is Namespace.INDIVIDUAL:
                predicates.append(NotEquals("p", self.type_id))
            elif namespaces[o.name] is Namespace.PROPERTY:
                err = (
                    f"Variable ?{o.name} cannot be both a property and an "
                    f"object."
                )
                raise PlanError(err)
            else:
                flags = (o.name,)
        for position, item in pattern.positions():
            if isinstance(item, Const):
                predicates.append(
                    self.constant_predicate(pattern, position, item, exact)
                )
        if (
            isinstance(p, Const)
            and self.entailment
            and not exact
            and p.id != self.type_id
            and self.tbox.subsumes(EntityKind.PROPERTY, self.type_id, p.id)
        ):
            predicates.append(NotEquals("p", self.type_id))
        if pattern.resource_object:
            if pattern.literal_ids is None:
                err = f"Pattern {pattern} was not located before planning."
                raise PlanError(err)
            if pattern.literal_ids:
                predicates.append(NotLiteral("o", pattern.literal_ids))
        outputs = []
        same = []
        seen = {}
        for position, item in pattern.positions():
            if not isinstance(item, Var):
                continue
            if item.name in seen:
                same.append((seen[item.name], position))
            else:
                seen[item.name] = position
                outputs.append((item.name, position))
        expand = (
            not exact
            and self.entailment
            and pattern.is_type
            and isinstance(o, Var)
            and seen[o.name] == "o"
        )
        return IntervalScan(
            pattern,
            tuple(predicates),
            tuple(outputs),
            tuple(same),
            flags,
            self.type_id,
            expand,
        )

    def disjunction_scans(self, element, namespaces) -> list:
        """Exact scans for the alternatives of a disjunction.

        Alternatives that differ only in the constant of one position share
        one scan with a membership predicate on that position.
        """
        groups = defaultdict(list)
        for pattern in element.alternatives:
            key = tuple(
                item if isinstance(item, Var) else None
                for _, item in pattern.positions()
            )
            groups[key].append(pattern)
        scans = []
        for members in groups.values():
            first = members[0]
            varying = [
                position
                for position, item in first.positions()
                if isinstance(item, Const)
                and len({getattr(m, position).id for m in members}) > 1
            ]
            if len(varying) != 1:
                scans.extend(
                    self.scan(member, namespaces, exact=True)
                    for member in members
                )
                continue
            column = varying[0]
            values = frozenset(getattr(m, column).id for m in members)
            scan = self.scan(first, namespaces, exact=True)
            predicates = tuple(
                IsIn(column, values)
                if isinstance(predicate, Equals) and predicate.column == column
                else predicate
                for predicate in scan.predicates
            )
            scans.append(replace(scan, predicates=predicates))
        return scans

    def element(self, element, namespaces):
        if isinstance(element, TriplePattern):
            return self.scan(element, namespaces)
        parts = []
        for scan in self.disjunction_scans(element, namespaces):
            flag_vars = tuple(
                name
                for name in element.visible
                if flag_column(name) in scan.columns
            )
            parts.append(Project(scan, element.visible, flag_vars))
        if len({part.columns for part in parts}) > 1:
            err = f"Alternatives of {element} bind different columns."
            raise PlanError(err)
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def branch(self, elements, namespaces):
        if not elements:
            err = "Empty graph patterns are not supported."
            raise PlanError(err)
        node = None
        for element in elements:
            right = self.element(element, namespaces)
            if node is None:
                node = right
                continue
            keys = tuple(
                name for name in node.columns if name in right.columns
            )
            node = HashJoin(node, right, keys)
        return node


def build_plan(query, tbox, entailment=True) -> PhysicalPlan:
    """Build the physical plan of a located query.

    :param Query query:  query returned by :func:`locate_query`
    :param TBoxEncoding tbox:  schema codes (None for SAE datasets)
    :param bool entailment:  use interval predicates and type expansion;
        otherwise every constant is matched exactly
    :returns:  physical plan
    :raises PlanError:  on namespace conflicts or unlocated constants
    """
    builder = _PlanBuilder(tbox, entailment)
    spaces = [builder.branch_namespaces(branch) for branch in query.branches]
    namespaces = {}
    for name in query.projection:
        used = {branch_spaces[name] for branch_spaces in spaces}
        if len(used) == 1:
            namespaces[name] = used.pop()
        elif Namespace.PROPERTY in used:
            err = f"Variable ?{name} is a property in some branches only."
            raise PlanError(err)
        else:
            namespaces[name] = MIXED
    mixed = tuple(
        name for name in query.projection if namespaces[name] is MIXED
    )
    flag_columns = tuple(flag_column(name) for name in mixed)
    children = []
    for ibranch, branch in enumerate(query.branches):
        if ibranch in query.empty_branches:
            children.append(Empty(query.projection + flag_columns))
            continue
        node = builder.branch(branch, spaces[ibranch])
        constant_flags = tuple(
            (name, spaces[ibranch][name] is Namespace.CONCEPT)
            for name in mixed
            if spaces[ibranch][name] is not MIXED
        )
        children.append(Project(node, query.projection, mixed, constant_flags))
    root = children[0] if len(children) == 1 else Union(tuple(children))
    plan = PhysicalPlan(
        root, query.projection, tuple(namespaces.items()), query.distinct
    )
    _LOGGER.debug(f"Plan: {plan_summary(plan)}")
    return plan


def _walk(node):
    yield node
    if isinstance(node, HashJoin):
        yield from _walk(node.left)
        yield from _walk(node.right)
    elif isinstance(node, Union):
        for branch in node.branches:
            yield from _walk(branch)
    elif isinstance(node, Project):
        yield from _walk(node.child)


def plan_summary(plan) -> dict:
    """Count the nodes and predicates of a plan.

    :param PhysicalPlan plan:  plan
    :returns:  dict with ``scans``, ``joins``, ``cross_products``,
        ``unions``, ``empty``, ``interval_predicates``,
        ``membership_predicates``, ``equality_predicates`` and
        ``expansions`` counts
    """
    summary = dict.fromkeys(
        (
            "scans",
            "joins",
            "cross_products",
            "unions",
            "empty",
            "interval_predicates",
            "membership_predicates",
            "equality_predicates",
            "expansions",
        ),
        0,
    )
    for node in _walk(plan.root):
        if isinstance(node, IntervalScan):
            summary["scans"] += 1
            summary["expansions"] += int(node.expand)
            for predicate in node.predicates:
                if isinstance(predicate, InInterval):
                    summary["interval_predicates"] += 1
                elif isinstance(predicate, (IsIn, NotLiteral)):
                    summary["membership_predicates"] += 1
                else:
                    summary["equality_predicates"] += 1
        elif isinstance(node, HashJoin):
            summary["joins" if node.keys else "cross_products"] += 1
        elif isinstance(node, Union):
            summary["unions"] += 1
        elif isinstance(node, Empty):
            summary["empty"] += 1
    return summary


def format_plan(plan) -> str:
    """Indented text rendering of a plan tree."""
    lines = []

    def visit(node, depth):
        pad = "  " * depth
        if isinstance(node, IntervalScan):
            predicates = ", ".join(str(p) for p in node.predicates)
            expand = " expand" if node.expand else ""
            lines.append(f"{pad}Scan [{node.pattern}] {predicates}{expand}")
        elif isinstance(node, HashJoin):
            keys = ", ".join(node.keys) or "(cross)"
            lines.append(f"{pad}HashJoin on {keys}")
            visit(node.left, depth + 1)
            visit(node.right, depth + 1)
        elif isinstance(node, Union):
            lines.append(f"{pad}Union ({len(node.branches)} branches)")
            for branch in node.branches:
                visit(branch, depth + 1)
        elif isinstance(node, Project):
            lines.append(f"{pad}Project {' '.join(node.columns)}")
            visit(node.child, depth + 1)
        else:
            lines.append(f"{pad}Empty")

    visit(plan.root, 0)
    return "\n".join(lines)
