"""Lite and full RDFS materialization of encoded datasets.

Lite materialization keeps every non-type triple and replaces the types
of each individual by the most specific concepts (MSC) among its explicit
types and the types implied by the domains and ranges of its properties.
Full materialization stores the complete RDFS closure.
"""
import logging
import time
from dataclasses import dataclass
import pandas as pd
from .dataset import COLUMNS, EncodingMode, Materialization, cast_frame
from .errors import (
    UnknownConceptError,
    UnknownEntityError,
    UnsupportedDatasetError,
)
from .hierarchy import EntityKind, is_descendant_or_self
from .parallel import run_partitions, shuffle


_LOGGER = logging.getLogger(__name__)


@dataclass
class TypeProfile:
    """Candidate types of one individual."""

    individual: int
    explicit_types: frozenset
    implicit_types: frozenset

    @property
    def candidates(self) -> frozenset:
        return self.explicit_types | self.implicit_types


@dataclass
class MaterializationReport:
    """Outcome of a materialization run.

    :param str mode:  ``lite`` or ``full``
    :param int triples_added:  triples present only in the output
    :param int triples_deleted:  triples present only in the input
    :param float duration_seconds:  wall-clock duration
    :param int input_triples:  input size
    """

    mode: str
    triples_added: int
    triples_deleted: int
    duration_seconds: float
    input_triples: int = 0

    @property
    def net(self) -> int:
        return self.triples_added - self.triples_deleted

    @property
    def output_triples(self) -> int:
        return self.input_triples + self.net

    def _percent(self, count) -> float:
        if not self.input_triples:
            return 0.0
        return 100.0 * count / self.input_triples

    def line(self) -> str:
        """One-line summary with counts, seconds, percentages and net."""
        return (
            f"{self.mode} {self.triples_added} {self.triples_deleted} "
            f"{self.duration_seconds:.3f} "
            f"{self._percent(self.triples_added):.2f}% "
            f"{self._percent(self.triples_deleted):.2f}% {self.net}"
        )


def _concept_code(tbox, value):
    try:
        return tbox.concepts.code_of(value)
    except UnknownEntityError:
        err = f"Concept id {value} is not in the concept table."
        raise UnknownConceptError(err)


def msc(candidates, tbox) -> frozenset:
    """Most specific concepts of a candidate set.

    Candidates are visited in descending code order; a subconcept always
    has a greater code than its canonical ancestors, so a candidate is kept
    unless an already kept concept lies in its interval. Residual pairs can
    put a subconcept below its ancestor's value, so a newly kept candidate
    also evicts kept concepts that subsume it.

    :param candidates:  concept ids
    :param TBoxEncoding tbox:  schema codes
    :returns:  minimal elements of ``candidates`` under subsumption
    :raises UnknownConceptError:  if a candidate has no code
    """
    residual = tbox.concept_residual
    codes = {
        int(value): _concept_code(tbox, int(value)) for value in candidates
    }
    kept = []
    for value in sorted(codes, reverse=True):
        code = codes[value]
        if any(
            is_descendant_or_self(member, code, residual) for member in kept
        ):
            continue
        if residual:
            kept = [
                member
                for member in kept
                if not is_descendant_or_self(value, codes[member], residual)
            ]
        kept.append(value)
    return frozenset(kept)


def _require_obe(ds):
    if ds.mode is not EncodingMode.OBE or ds.tbox is None:
        err = "Materialization needs an ontology-based (obe) encoding."
        raise UnsupportedDatasetError(err)


def _pairs(mapping, columns, dtype) -> pd.DataFrame:
    """Frame of (key, value) rows from a dict of key -> iterable."""
    rows = [
        (key, value) for key, values in mapping.items() for value in values
    ]
    frame = pd.DataFrame(rows, columns=columns, dtype=object)
    return cast_frame(frame, dtype)


def _expand(frame, key, pairs, new_key) -> pd.DataFrame:
    """Join rows with (key, new_key) pairs, replacing ``key``."""
    if frame.empty or pairs.empty:
        return frame.iloc[0:0].copy()
    merged = frame.merge(pairs, on=key, how="inner")
    return merged.drop(columns=[key]).rename(columns={new_key: key})


def _split_types(part, type_id) -> tuple:
    is_type = part["p"] == type_id
    return part[is_type], part[~is_type]


def _domain_range_types(
    plain, domains, ranges, literals, dtype
) -> pd.DataFrame:
    """(individual, concept) rows implied by domain and range axioms."""
    by_domain = _expand(plain[["s", "p"]], "p", domains, "c").rename(
        columns={"s": "i", "p": "c"}
    )
    objects = plain[["o", "p"]][~plain["o"].isin(literals)]
    by_range = _expand(objects, "p", ranges, "c").rename(
        columns={"o": "i", "p": "c"}
    )
    found = pd.concat([by_domain, by_range], ignore_index=True)
    if not len(found):
        return _empty(["i", "c"], dtype)
    return cast_frame(found, dtype)


def _empty(columns, dtype) -> pd.DataFrame:
    return pd.DataFrame(
        {column: pd.Series([], dtype=dtype) for column in columns}
    )


def _profiles(bucket) -> list:
    """Group (individual, concept, explicit) rows into type profiles."""
    profiles = []
    for individual, group in bucket.groupby("i", sort=False):
        explicit = group["c"][group["explicit"]]
        implicit = group["c"][~group["explicit"]]
        profiles.append(
            TypeProfile(
                int(individual),
                frozenset(int(value) for value in explicit),
                frozenset(int(value) for value in implicit),
            )
        )
    return profiles


def lite_materialize(ds, workers=None) -> tuple:
    """Replace each individual's types by its most specific concepts.

    :param EncodedDataset ds:  ontology-based encoded dataset
    :param int workers:  maximum number of threads
    :returns:  (new dataset, report)
    :raises UnsupportedDatasetError:  for SAE datasets
    """
    _require_obe(ds)
    start_time = time.perf_counter()
    tbox = ds.tbox
    type_id = tbox.type_id
    dtype = ds.dtype
    if not ds.partitions or not len(ds):
        report = MaterializationReport("lite", 0, 0, 0.0, len(ds))
        return ds.with_partitions(ds.partitions, Materialization.LITE), report
    properties = set()
    for part in ds.partitions:
        properties.update(int(value) for value in part["p"].unique())
    properties.discard(type_id)
    domains = _pairs(
        {prop: tbox.effective_domains(prop) for prop in properties},
        ["p", "c"],
        dtype,
    )
    ranges = _pairs(
        {prop: tbox.effective_ranges(prop) for prop in properties},
        ["p", "c"],
        dtype,
    )
    literals = list(ds.individuals.literal_ids())

    def candidates(part):
        typed, plain = _split_types(part, type_id)
        explicit = typed[["s", "o"]].rename(columns={"s": "i", "o": "c"})
        implicit = _domain_range_types(plain, domains, ranges, literals, dtype)
        return pd.concat(
            [explicit.assign(explicit=True), implicit.assign(explicit=False)],
            ignore_index=True,
        )

    parts = run_partitions(candidates, ds.partitions, workers)
    buckets = shuffle(parts, len(ds.partitions), columns="i", workers=workers)

    def reduce_types(bucket):
        rows = []
        added = deleted = 0
        for profile in _profiles(bucket):
            kept = msc(profile.candidates, tbox)
            added += len(kept - profile.explicit_types)
            deleted += len(profile.explicit_types - kept)
            rows.extend((profile.individual, type_id, value) for value in kept)
        frame = pd.DataFrame(rows, columns=COLUMNS, dtype=object)
        return cast_frame(frame, dtype), added, deleted

    reduced = run_partitions(reduce_types, buckets, workers)
    outputs = [
        pd.concat([_split_types(part, type_id)[1], types], ignore_index=True)
        for part, (types, _, _) in zip(ds.partitions, reduced)
    ]
    report = MaterializationReport(
        "lite",
        sum(added for _, added, _ in reduced),
        sum(deleted for _, _, deleted in reduced),
        time.perf_counter() - start_time,
        len(ds),
    )
    _LOGGER.info(f"Lite materialization: {report.line()}")
    return ds.with_partitions(outputs, Materialization.LITE), report


def full_materialize(ds, workers=None) -> tuple:
    """Compute the RDFS closure of a dataset.

    The rules run once each in a fixed order: sub-property closure, then
    domain and range typing, then sub-concept closure. rdf:type never has a
    super-property, so this order reaches the fixpoint. The virtual roots
    are not materialized.

    :param EncodedDataset ds:  ontology-based encoded dataset
    :param int workers:  maximum number of threads
    :returns:  (closed dataset, report)
    :raises UnsupportedDatasetError:  for SAE datasets
    """
    _require_obe(ds)
    start_time = time.perf_counter()
    tbox = ds.tbox
    type_id = tbox.type_id
    dtype = ds.dtype
    if not ds.partitions or not len(ds):
        report = MaterializationReport("full", 0, 0, 0.0, len(ds))
        return ds.with_partitions(ds.partitions, Materialization.FULL), report
    properties = set()
    concepts = set(tbox.concepts.by_value)
    for part in ds.partitions:
        properties.update(int(value) for value in part["p"].unique())
    properties.discard(type_id)
    super_properties = _pairs(
        {
            prop: tbox.ancestors(EntityKind.PROPERTY, prop)
            for prop in properties
        },
        ["p", "q"],
        dtype,
    )
    closed_properties = set(int(value) for value in super_properties["q"])
    domains = _pairs(
        {prop: tbox.domain_map.get(prop, ()) for prop in closed_properties},
        ["p", "c"],
        dtype,
    )
    ranges = _pairs(
        {prop: tbox.range_map.get(prop, ()) for prop in closed_properties},
        ["p", "c"],
        dtype,
    )
    super_concepts = _pairs(
        {
            concept: tbox.ancestors(EntityKind.CONCEPT, concept)
            for concept in concepts
        },
        ["o", "d"],
        dtype,
    )
    literals = list(ds.individuals.literal_ids())

    def close(part):
        typed, plain = _split_types(part, type_id)
        plain = _expand(plain, "p", super_properties, "q")[COLUMNS]
        implied = _domain_range_types(plain, domains, ranges, literals, dtype)
        implied = implied.rename(columns={"i": "s", "c": "o"})
        implied = implied.assign(p=type_id)
        typed = pd.concat([typed, implied[COLUMNS]], ignore_index=True)
        typed = _expand(typed, "o", super_concepts, "d")[COLUMNS]
        return cast_frame(pd.concat([plain, typed], ignore_index=True), dtype)

    closed = run_partitions(close, ds.partitions, workers)
    outputs = shuffle(closed, len(ds.partitions), workers=workers)
    outputs = run_partitions(
        lambda part: part.drop_duplicates().reset_index(drop=True),
        outputs,
        workers,
    )
    total = sum(len(part) for part in outputs)
    report = MaterializationReport(
        "full",
        total - len(ds),
        0,
        time.perf_counter() - start_time,
        len(ds),
    )
    _LOGGER.info(f"Full materialization: {report.line()}")
    return ds.with_partitions(outputs, Materialization.FULL), report
