"""Execute physical plans over the partitions of an encoded dataset."""
import logging
import threading
import time
from dataclasses import dataclass, field
import numpy as np
import pandas as pd
from ..dataset import Namespace, extract
from ..hierarchy import EntityKind
from ..parallel import run_partitions, shuffle
from .plan import (
    FLAG_SUFFIX,
    MIXED,
    Empty,
    HashJoin,
    IntervalScan,
    Project,
    Union,
    flag_column,
)


_LOGGER = logging.getLogger(__name__)


@dataclass
class ExecutionStats:
    """Work counters filled in during execution.

    :param int scans:  scan nodes executed
    :param int rows_scanned:  triples read by scans
    :param int comparisons:  predicate evaluations (a residual lookup
        counts as one)
    """

    scans: int = 0
    rows_scanned: int = 0
    comparisons: int = 0
    _lock: object = field(
        default_factory=threading.Lock, repr=False, compare=False
    )

    def add(self, rows, comparisons):
        with self._lock:
            self.rows_scanned += rows
            self.comparisons += comparisons


@dataclass
class ResultSet:
    """Rows of encoded ids.

    :param tuple variables:  projected variables
    :param pd.DataFrame frame:  one column per variable, plus flag columns
        of mixed variables
    :param tuple namespaces:  (variable, namespace) decode context
    """

    variables: tuple
    frame: pd.DataFrame
    namespaces: tuple

    def __len__(self):
        return len(self.frame)

    def distinct(self) -> "ResultSet":
        frame = self.frame.drop_duplicates().reset_index(drop=True)
        return ResultSet(self.variables, frame, self.namespaces)

    def rows(self) -> list:
        """Rows as tuples of Python ints (variables only)."""
        columns = [
            [int(value) for value in self.frame[name]]
            for name in self.variables
        ]
        if not columns:
            return [() for _ in range(len(self.frame))]
        return list(zip(*columns))


class _Executor:
    def __init__(self, ds, prune_empty, stats, workers):
        self.ds = ds
        self.prune_empty = prune_empty
        self.stats = stats
        self.workers = workers
        self.buckets = max(1, len(ds.partitions))
        self._ancestors = None

    def run(self, node) -> list:
        if isinstance(node, IntervalScan):
            return self.scan(node)
        if isinstance(node, HashJoin):
            return self.join(node)
        if isinstance(node, Union):
            return [
                part for branch in node.branches for part in self.run(branch)
            ]
        if isinstance(node, Project):
            return self.project(node)
        return [self.empty(node.columns)]

    def empty(self, columns) -> pd.DataFrame:
        return pd.DataFrame(
            {
                name: pd.Series(
                    [],
                    dtype=bool
                    if name.endswith(FLAG_SUFFIX)
                    else self.ds.dtype,
                )
                for name in columns
            }
        )

    def ancestor_pairs(self) -> pd.DataFrame:
        """(concept, ancestor-or-self) rows, the virtual root excluded."""
        if self._ancestors is None:
            tbox = self.ds.tbox
            rows = [
                (concept, ancestor)
                for concept in tbox.concepts.by_value
                for ancestor in tbox.ancestors(EntityKind.CONCEPT, concept)
            ]
            frame = pd.DataFrame(
                rows, columns=["concept", "ancestor"], dtype=object
            )
            if self.ds.dtype is object:
                self._ancestors = frame
            else:
                self._ancestors = frame.astype(np.uint64)
        return self._ancestors

    def scan(self, node) -> list:
        if self.stats is not None:
            self.stats.scans += 1
        per_row = sum(predicate.comparisons for predicate in node.predicates)
        per_row += len(node.same)
        pairs = self.ancestor_pairs() if node.expand else None

        def run(part):
            mask = np.ones(len(part), dtype=bool)
            for predicate in node.predicates:
                mask &= predicate.mask(part[predicate.column])
            for left, right in node.same:
                mask &= (part[left] == part[right]).to_numpy(dtype=bool)
            rows = part[mask]
            out = pd.DataFrame(index=pd.RangeIndex(len(rows)))
            for name, column in node.outputs:
                out[name] = rows[column].to_numpy()
            for name in node.flags:
                is_type = rows["p"] == node.type_id
                out[flag_column(name)] = is_type.to_numpy(dtype=bool)
            if pairs is not None:
                name = node.pattern.o.name
                out = out.merge(pairs, left_on=name, right_on="concept")
                out = out.drop(columns=[name, "concept"])
                out = out.rename(columns={"ancestor": name})
                out = out[list(node.columns)]
            if self.stats is not None:
                self.stats.add(len(part), len(part) * per_row)
            return out

        if not self.ds.partitions:
            return [self.empty(node.columns)]
        return run_partitions(run, self.ds.partitions, self.workers)

    def join(self, node) -> list:
        left = self.run(node.left)
        if self.prune_empty and not any(len(part) for part in left):
            _LOGGER.debug("Left input is empty; skipping the right input.")
            return [self.empty(node.columns)]
        right = self.run(node.right)
        if not node.keys:
            table = pd.concat(right, ignore_index=True)
            return run_partitions(
                lambda part: part.merge(table, how="cross"), left, self.workers
            )
        keys = list(node.keys)
        left, right = (
            shuffle(side, self.buckets, columns=keys, workers=self.workers)
            for side in (left, right)
        )
        return run_partitions(
            lambda pair: pair[0].merge(pair[1], on=keys, how="inner"),
            list(zip(left, right)),
            self.workers,
        )

    def project(self, node) -> list:
        constant = dict(node.constant_flags)

        def run(part):
            out = part[list(node.variables)].copy()
            for name in node.flag_vars:
                column = flag_column(name)
                if column in part:
                    out[column] = part[column].to_numpy(dtype=bool)
                else:
                    out[column] = np.full(
                        len(part), constant[name], dtype=bool
                    )
            return out

        return run_partitions(run, self.run(node.child), self.workers)


def execute(
    plan, ds, prune_empty=False, stats=None, workers=None
) -> ResultSet:
    """Evaluate a plan with bag semantics.

    :param PhysicalPlan plan:  plan built against the dataset's TBox
    :param EncodedDataset ds:  dataset
    :param bool prune_empty:  stop evaluating a conjunction as soon as its
        left input is empty
    :param ExecutionStats stats:  optional work counters
    :param int workers:  maximum number of threads
    :returns:  result set (duplicates kept unless the plan is DISTINCT)
    """
    start_time = time.perf_counter()
    executor = _Executor(ds, prune_empty, stats, workers)
    parts = executor.run(plan.root)
    frame = pd.concat(parts, ignore_index=True)
    results = ResultSet(plan.projection, frame, plan.namespaces)
    if plan.distinct:
        results = results.distinct()
    _LOGGER.debug(
        f"Executed plan: {len(results)} rows in "
        f"{time.perf_counter() - start_time:.3f} s."
    )
    return results


def extract_results(rs, ds) -> list:
    """Decode a result set.

    Each column is decoded in the namespace the plan assigned to it; mixed
    columns use their flag column row by row.

    :param ResultSet rs:  result set
    :param EncodedDataset ds:  dataset that produced it
    :returns:  list of tuples of terms
    :raises NotFoundError:  if an id is missing from its table
    """
    namespaces = dict(rs.namespaces)
    cache = {}

    def decode(value, namespace):
        key = (int(value), namespace)
        if key not in cache:
            cache[key] = extract(key[0], namespace, ds)
        return cache[key]

    columns = []
    for name in rs.variables:
        values = rs.frame[name].to_numpy()
        namespace = namespaces[name]
        if namespace is MIXED:
            flags = rs.frame[flag_column(name)].to_numpy(dtype=bool)
            spaces = [
                Namespace.CONCEPT if flag else Namespace.INDIVIDUAL
                for flag in flags
            ]
        else:
            spaces = [namespace] * len(values)
        columns.append(
            [decode(value, space) for value, space in zip(values, spaces)]
        )
    if not columns:
        return [() for _ in range(len(rs.frame))]
    return list(zip(*columns))


def format_rows(rows, variables, style="tsv") -> list:
    """Render decoded rows as text lines.

    :param list rows:  tuples of terms
    :param tuple variables:  column names
    :param str style:  ``tsv`` (header line, IRIs without brackets) or
        ``nt`` (every cell in N-Triples syntax)
    :returns:  list of lines without newlines
    """
    if style == "nt":
        return ["\t".join(term.n3() for term in row) for row in rows]
    lines = ["\t".join(f"?{name}" for name in variables)]
    for row in rows:
        lines.append(
            "\t".join(
                term.n3() if term.is_literal else term.lexical for term in row
            )
        )
    return lines
