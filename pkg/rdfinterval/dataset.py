"""Dictionary encoding of partitioned triple datasets.

Individuals (subjects and objects that are not schema entities, literals
included) receive dense ids through a hash-partition / count / prefix-sum
scheme; predicates and rdf:type objects take their codes from the TBox
encoding. The same integer may denote a concept, a property and an
individual: positions decide which table decodes it.
"""
import configparser
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
import numpy as np
import pandas as pd
from .config import BROADCAST_THRESHOLD
from .errors import FormatError, NotFoundError, UnknownSchemaTermError
from .fileio import atomic_open
from .hierarchy import load_tbox, serialize_tbox
from .parallel import hash_split, run_partitions, shuffle
from .rdf.ntriples import parse_term
from .rdf.terms import RDF_TYPE, Term, Triple


_LOGGER = logging.getLogger(__name__)
COLUMNS = ["s", "p", "o"]
TYPE_N3 = f"<{RDF_TYPE}>"
NARROW_WIDTH = 64
FORMAT_NAME = "rdfinterval-dataset-1"
MANIFEST_FILE = "manifest.ini"
TBOX_FILE = "tbox.txt"
INDIVIDUALS_FILE = "individuals.tsv"
PART_FILE = "part-{:05d}.bin"


class EncodingMode(Enum):
    """Dictionary encoding strategies."""

    #: ontology-based encoding: schema terms use TBox codes
    OBE = "obe"
    #: standard ABox encoding: every term goes to one dictionary
    SAE = "sae"


class Namespace(Enum):
    """Id spaces of an encoded dataset."""

    CONCEPT = "concept"
    PROPERTY = "property"
    INDIVIDUAL = "individual"


class Materialization(Enum):
    NONE = "none"
    LITE = "lite"
    FULL = "full"


@dataclass
class IndividualDictionary:
    """Bijection between individual terms and dense integer ids.

    Terms are keyed by their N-Triples rendering.

    :param dict to_id:  N-Triples term to id
    :param dict to_term:  id to N-Triples term
    """

    to_id: dict = field(default_factory=dict)
    to_term: dict = field(default_factory=dict)

    @property
    def next_id(self) -> int:
        return max(self.to_term, default=-1) + 1

    def __len__(self):
        return len(self.to_id)

    def literal_ids(self) -> frozenset:
        """Ids of the literal terms."""
        return frozenset(
            value for key, value in self.to_id.items() if key.startswith('"')
        )

    def locate(self, term) -> int:
        """Id of a term.

        :param term:  Term or its N-Triples text
        :raises NotFoundError:  if the term is not in the dictionary
        """
        key = term.n3() if isinstance(term, Term) else term
        try:
            return self.to_id[key]
        except KeyError:
            err = f"Individual {key} is not in the dictionary."
            raise NotFoundError(err)

    def extract(self, value) -> Term:
        """Term of an id.

        :raises NotFoundError:  if the id is not in the dictionary
        """
        try:
            return parse_term(self.to_term[int(value)])
        except KeyError:
            err = f"Individual id {value} is not in the dictionary."
            raise NotFoundError(err)


def record_width(tbox) -> int:
    """Stored integer width: the widest code rounded up to whole bytes."""
    width = NARROW_WIDTH
    if tbox is not None:
        width = max(
            width, tbox.concepts.code_length, tbox.properties.code_length
        )
    return -(-width // 8) * 8


@dataclass
class EncodedDataset:
    """Partitions of encoded triples plus the tables that decode them.

    Each partition is a DataFrame with columns ``s``, ``p`` and ``o``;
    the columns are ``uint64`` when the record width is 64 bits and hold
    Python integers otherwise.

    :param list partitions:  encoded triple frames
    :param TBoxEncoding tbox:  schema codes (None for SAE)
    :param IndividualDictionary individuals:  individual dictionary
    :param EncodingMode mode:  encoding strategy
    :param Materialization materialization:  inference already applied
    """

    partitions: list
    tbox: object
    individuals: IndividualDictionary
    mode: EncodingMode = EncodingMode.OBE
    materialization: Materialization = Materialization.NONE

    @property
    def width(self) -> int:
        return record_width(self.tbox)

    @property
    def dtype(self):
        return np.uint64 if self.width <= NARROW_WIDTH else object

    @property
    def type_id(self) -> int:
        """Encoded rdf:type in predicate position."""
        if self.mode is EncodingMode.SAE:
            return self.individuals.locate(TYPE_N3)
        return self.tbox.type_id

    def __len__(self):
        return sum(len(part) for part in self.partitions)

    def frame(self) -> pd.DataFrame:
        """All partitions as one frame."""
        if not self.partitions:
            return empty_frame(self.dtype)
        return pd.concat(self.partitions, ignore_index=True)

    def with_partitions(self, partitions, materialization) -> "EncodedDataset":
        """Copy sharing the dictionaries but holding new partitions."""
        return EncodedDataset(
            partitions, self.tbox, self.individuals, self.mode, materialization
        )


def empty_frame(dtype=np.uint64) -> pd.DataFrame:
    return pd.DataFrame(
        {column: pd.Series([], dtype=dtype) for column in COLUMNS}
    )


def cast_frame(frame, dtype) -> pd.DataFrame:
    """Convert id columns to the dataset's storage type."""
    if dtype is object:
        return pd.DataFrame(
            {column: frame[column].map(int).astype(object) for column in frame}
        )
    return frame.astype(np.uint64)


def split_partitions(triples, partitions) -> list:
    """Cut a triple stream into contiguous partitions of similar size.

    :param triples:  iterable of triples
    :param int partitions:  number of partitions
    :returns:  list of ``partitions`` lists
    """
    triples = list(triples)
    bounds = np.linspace(0, len(triples), partitions + 1).astype(int)
    return [
        triples[bounds[ipart] : bounds[ipart + 1]]
        for ipart in range(partitions)
    ]


def _to_frame(triples) -> pd.DataFrame:
    rows = [(t.s.n3(), t.p.n3(), t.o.n3()) for t in triples]
    return pd.DataFrame(rows, columns=COLUMNS, dtype=object)


def _individual_terms(frame, mode) -> pd.Series:
    """Distinct terms of one partition that go to the individual dictionary."""
    if mode is EncodingMode.SAE:
        values = [frame["s"], frame["p"], frame["o"]]
    else:
        plain = frame["p"] != TYPE_N3
        values = [frame["s"], frame["o"][plain]]
    terms = pd.concat(values, ignore_index=True).drop_duplicates()
    return terms.reset_index(drop=True)


def _assign_ids(term_parts, partitions, workers) -> list:
    """Give every distinct term a dense id.

    Terms are hash-partitioned so duplicates meet in one bucket; each bucket
    counts its distinct terms and an exclusive prefix sum over the counts
    gives each bucket a disjoint id interval.

    :returns:  per-bucket lookup Series (index: term, values: id)
    """
    buckets = shuffle(term_parts, partitions, workers=workers)
    buckets = run_partitions(
        lambda bucket: bucket.drop_duplicates().reset_index(drop=True),
        buckets,
        workers,
    )
    counts = np.array([len(bucket) for bucket in buckets], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    _LOGGER.debug(f"Individual id intervals start at {offsets.tolist()}.")
    return [
        pd.Series(
            np.arange(offset, offset + len(bucket), dtype=np.int64),
            index=pd.Index(bucket.to_numpy(dtype=object)),
            dtype=object,
        )
        for offset, bucket in zip(offsets, buckets)
    ]


def _lookup_buckets(mapping, partitions) -> list:
    """Hash-partition a term -> id mapping the same way as term buckets."""
    terms = pd.Series(list(mapping), dtype=object)
    ids = pd.Series(list(mapping.values()), dtype=object)
    frame = pd.DataFrame({"term": terms, "id": ids})
    pieces = hash_split(frame, partitions, "term")
    return [
        pd.Series(
            piece["id"].to_numpy(),
            index=pd.Index(piece["term"].to_numpy()),
            dtype=object,
        )
        for piece in pieces
    ]


def _map_column(parts, column, buckets, broadcast, error, workers) -> list:
    """Replace the terms of one column by ids.

    With ``broadcast`` every worker receives the whole lookup table;
    otherwise the triples are shuffled on the column so that bucket ``i``
    only needs lookup bucket ``i``.

    :param list parts:  frames of N-Triples terms
    :param str column:  column to translate
    :param list buckets:  hash-partitioned lookup Series
    :param bool broadcast:  replicate the lookup table
    :param type error:  exception raised for a term without id
    :returns:  list of frames with the column translated
    """
    if broadcast:
        table = pd.concat(buckets) if len(buckets) > 1 else buckets[0]
        pairs = [(part, table) for part in parts]
    else:
        parts = shuffle(parts, len(buckets), columns=column, workers=workers)
        pairs = list(zip(parts, buckets))

    def translate(pair):
        part, table = pair
        ids = part[column].map(table)
        missing = ids.isna()
        if missing.any():
            term = part[column][missing].iloc[0]
            err = f"No {column!r} id for {term}."
            raise error(err)
        return part.assign(**{column: ids})

    return run_partitions(translate, pairs, workers)


def encode_dataset(
    partitions,
    tbox,
    num_partitions=None,
    mode=EncodingMode.OBE,
    broadcast_threshold=BROADCAST_THRESHOLD,
    workers=None,
) -> EncodedDataset:
    """Dictionary-encode a partitioned triple dataset.

    :param list partitions:  input partitions, each an iterable of triples
    :param TBoxEncoding tbox:  schema codes (ignored in SAE mode)
    :param int num_partitions:  output partition count (default: input
        partition count)
    :param EncodingMode mode:  OBE or SAE
    :param int broadcast_threshold:  largest concept/individual map that
        is replicated instead of shuffled
    :param int workers:  maximum number of threads
    :returns:  encoded dataset with duplicate triples removed
    :raises UnknownSchemaTermError:  if a predicate or rdf:type object has
        no code in ``tbox``
    """
    start_time = time.perf_counter()
    frames = run_partitions(_to_frame, partitions or [[]], workers)
    num_partitions = num_partitions or len(frames)
    if mode is EncodingMode.SAE:
        tbox = None
    term_parts = run_partitions(
        lambda frame: _individual_terms(frame, mode), frames, workers
    )
    individuals = _assign_ids(term_parts, num_partitions, workers)
    num_individuals = sum(len(bucket) for bucket in individuals)
    broadcast = num_individuals <= broadcast_threshold
    _LOGGER.info(
        f"Assigned {num_individuals} individual ids over {num_partitions} "
        f"partitions ({'broadcast' if broadcast else 'shuffle'} join)."
    )
    if mode is EncodingMode.SAE:
        encoded = frames
        for column in COLUMNS:
            encoded = _map_column(
                encoded, column, individuals, broadcast, NotFoundError, workers
            )
    else:
        is_type = [frame["p"] == TYPE_N3 for frame in frames]
        plain = [frame[~mask] for frame, mask in zip(frames, is_type)]
        typed = [frame[mask] for frame, mask in zip(frames, is_type)]
        properties = _lookup_buckets(
            {
                f"<{iri}>": code.value
                for iri, code in tbox.properties.by_label.items()
            },
            1,
        )
        concepts = _lookup_buckets(
            {
                f"<{iri}>": code.value
                for iri, code in tbox.concepts.by_label.items()
            },
            num_partitions,
        )
        plain = _map_column(
            plain, "p", properties, True, UnknownSchemaTermError, workers
        )
        typed = _map_column(
            typed,
            "o",
            concepts,
            len(tbox.concepts.by_label) <= broadcast_threshold,
            UnknownSchemaTermError,
            workers,
        )
        typed = [part.assign(p=tbox.type_id) for part in typed]
        plain = _map_column(
            plain, "o", individuals, broadcast, NotFoundError, workers
        )
        encoded = _map_column(
            plain + typed, "s", individuals, broadcast, NotFoundError, workers
        )
    dtype = np.uint64 if record_width(tbox) <= NARROW_WIDTH else object
    encoded = run_partitions(
        lambda part: cast_frame(part[COLUMNS], dtype), encoded, workers
    )
    result = shuffle(encoded, num_partitions, workers=workers)
    result = run_partitions(
        lambda part: part.drop_duplicates().reset_index(drop=True),
        result,
        workers,
    )
    pairs = [
        (term, int(value))
        for bucket in individuals
        for term, value in bucket.items()
    ]
    dictionary = IndividualDictionary(
        dict(pairs), {value: term for term, value in pairs}
    )
    dataset = EncodedDataset(result, tbox, dictionary, mode)
    duration = time.perf_counter() - start_time
    _LOGGER.info(
        f"Encoded {len(dataset)} distinct triples ({mode.value}) in "
        f"{duration:.3f} s."
    )
    return dataset


def locate(term, ds, namespace=None) -> tuple:
    """Find the id of a term.

    :param Term term:  term to look up
    :param EncodedDataset ds:  dataset
    :param Namespace namespace:  table to search; when None the individual,
        property and concept tables are tried in that order
    :returns:  (id, namespace)
    :raises NotFoundError:  if no searched table holds the term
    """
    if ds.mode is EncodingMode.SAE:
        return ds.individuals.locate(term), Namespace.INDIVIDUAL
    if namespace is None:
        order = [Namespace.INDIVIDUAL, Namespace.PROPERTY, Namespace.CONCEPT]
    else:
        order = [namespace]
    for space in order:
        if space is Namespace.INDIVIDUAL:
            if term.n3() in ds.individuals.to_id:
                return ds.individuals.to_id[term.n3()], space
        elif term.is_iri:
            table = ds.tbox.concepts
            if space is Namespace.PROPERTY:
                table = ds.tbox.properties
            if term.lexical in table.by_label:
                return table.by_label[term.lexical].value, space
    tables = " / ".join(space.value for space in order)
    err = f"{term.n3()} is not in the {tables} table."
    raise NotFoundError(err)


def extract(value, namespace, ds) -> Term:
    """Term of an id within a namespace.

    :raises NotFoundError:  if the id is not in the named table
    """
    if namespace is Namespace.INDIVIDUAL or ds.mode is EncodingMode.SAE:
        return ds.individuals.extract(value)
    table = ds.tbox.concepts
    if namespace is Namespace.PROPERTY:
        table = ds.tbox.properties
    try:
        return Term.iri(table.by_value[int(value)])
    except KeyError:
        err = f"No {namespace.value} with id {value}."
        raise NotFoundError(err)


def _decode_column(values, mapping, namespace) -> list:
    terms = []
    for value in values:
        try:
            terms.append(mapping[int(value)])
        except KeyError:
            err = f"No {namespace.value} with id {value}."
            raise NotFoundError(err)
    return terms


def decode_frame(frame, ds) -> pd.DataFrame:
    """Translate one encoded frame back to N-Triples terms.

    Predicates decode as properties, objects of rdf:type as concepts and
    everything else as individuals.
    """
    individuals = ds.individuals.to_term
    if ds.mode is EncodingMode.SAE:
        return pd.DataFrame(
            {
                column: _decode_column(
                    frame[column], individuals, Namespace.INDIVIDUAL
                )
                for column in COLUMNS
            },
            dtype=object,
        )
    properties = {
        value: f"<{iri}>" for value, iri in ds.tbox.properties.by_value.items()
    }
    concepts = {
        value: f"<{iri}>" for value, iri in ds.tbox.concepts.by_value.items()
    }
    is_type = (frame["p"] == ds.type_id).to_numpy()
    objects = np.empty(len(frame), dtype=object)
    objects[is_type] = _decode_column(
        frame["o"][is_type], concepts, Namespace.CONCEPT
    )
    objects[~is_type] = _decode_column(
        frame["o"][~is_type], individuals, Namespace.INDIVIDUAL
    )
    return pd.DataFrame(
        {
            "s": _decode_column(frame["s"], individuals, Namespace.INDIVIDUAL),
            "p": _decode_column(frame["p"], properties, Namespace.PROPERTY),
            "o": objects,
        },
        dtype=object,
    )


def decode_dataset(ds, workers=None) -> list:
    """Decode every triple of a dataset.

    :param EncodedDataset ds:  dataset
    :returns:  list of triples in partition order
    :raises NotFoundError:  if an id is missing from its table
    """
    frames = run_partitions(
        lambda part: decode_frame(part, ds), ds.partitions, workers
    )
    cache = {}

    def term(text):
        if text not in cache:
            cache[text] = parse_term(text)
        return cache[text]

    return [
        Triple(term(s), term(p), term(o))
        for frame in frames
        for s, p, o in frame.itertuples(index=False)
    ]


def _to_records(frame, width) -> bytes:
    if width == NARROW_WIDTH:
        return frame[COLUMNS].to_numpy(dtype="<u8").tobytes()
    size = width // 8
    return b"".join(
        int(value).to_bytes(size, "little")
        for value in frame[COLUMNS].to_numpy(dtype=object).ravel()
    )


def _from_records(data, width, path) -> pd.DataFrame:
    size = width // 8
    if len(data) % (3 * size):
        err = f"{path} does not hold whole {width}-bit records."
        raise FormatError(err)
    if width == NARROW_WIDTH:
        values = np.frombuffer(data, dtype="<u8").astype(np.uint64)
        return pd.DataFrame(values.reshape(-1, 3), columns=COLUMNS)
    values = [
        int.from_bytes(data[offset : offset + size], "little")
        for offset in range(0, len(data), size)
    ]
    rows = [values[index : index + 3] for index in range(0, len(values), 3)]
    if not rows:
        return empty_frame(object)
    return pd.DataFrame(rows, columns=COLUMNS, dtype=object)


def save_dataset(ds, directory) -> Path:
    """Write a dataset directory.

    The directory holds ``manifest.ini``, the TBox encoding (OBE only), the
    individual dictionary as ``id<TAB>term`` lines and one file of
    little-endian fixed-width ``(s, p, o)`` records per partition. Every
    file is written under a temporary name and renamed when complete.

    :param EncodedDataset ds:  dataset to save
    :param directory:  output directory (created if needed)
    :returns:  path of the manifest
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    width = ds.width
    files = []
    for ipart, part in enumerate(ds.partitions):
        name = PART_FILE.format(ipart)
        with atomic_open(directory / name, "wb") as part_file:
            part_file.write(_to_records(part, width))
        files.append(name)
    with atomic_open(directory / INDIVIDUALS_FILE) as dict_file:
        for value, term in sorted(ds.individuals.to_term.items()):
            dict_file.write(f"{value}\t{term}\n")
    if ds.tbox is not None:
        with atomic_open(directory / TBOX_FILE) as tbox_file:
            tbox_file.write(serialize_tbox(ds.tbox))
    manifest = configparser.ConfigParser()
    manifest["dataset"] = {
        "format": FORMAT_NAME,
        "mode": ds.mode.value,
        "materialization": ds.materialization.value,
        "width": str(width),
        "partitions": str(len(files)),
        "triples": str(len(ds)),
        "tbox": TBOX_FILE if ds.tbox is not None else "",
        "individuals": INDIVIDUALS_FILE,
        "files": "\n".join(files),
    }
    manifest_path = directory / MANIFEST_FILE
    with atomic_open(manifest_path) as manifest_file:
        manifest.write(manifest_file)
    _LOGGER.info(
        f"Saved {len(ds)} triples in {len(files)} partitions to {directory}."
    )
    return manifest_path


def _read_dictionary(path) -> IndividualDictionary:
    to_id = {}
    to_term = {}
    with open(path, "rt", encoding="utf-8") as dict_file:
        for line_number, line in enumerate(dict_file, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            value, sep, term = line.partition("\t")
            if not sep or not value.isdigit():
                err = f"{path} line {line_number}: expected id<TAB>term."
                raise FormatError(err)
            to_id[term] = int(value)
            to_term[int(value)] = term
    return IndividualDictionary(to_id, to_term)


def load_dataset(directory) -> EncodedDataset:
    """Read a dataset directory written by :func:`save_dataset`.

    :param directory:  dataset directory
    :returns:  encoded dataset
    :raises FormatError:  if the manifest or a data file is corrupt
    """
    directory = Path(directory)
    manifest = configparser.ConfigParser()
    if not manifest.read(directory / MANIFEST_FILE, encoding="utf-8"):
        err = f"No {MANIFEST_FILE} in {directory}."
        raise FormatError(err)
    try:
        section = manifest["dataset"]
        format_name = section["format"]
        mode = EncodingMode(section["mode"])
        materialization = Materialization(
            section.get("materialization", "none")
        )
        width = section.getint("width")
        files = [name for name in section["files"].split("\n") if name]
        tbox_name = section.get("tbox", "")
        dict_name = section["individuals"]
    except (KeyError, ValueError) as error:
        err = f"Corrupt manifest in {directory}: {error}"
        raise FormatError(err)
    if format_name != FORMAT_NAME:
        err = f"Unsupported dataset format {format_name!r}."
        raise FormatError(err)
    tbox = None
    if tbox_name:
        tbox = load_tbox((directory / tbox_name).read_text(encoding="utf-8"))
    if width != record_width(tbox):
        err = f"Manifest width {width} does not match the TBox encoding."
        raise FormatError(err)
    individuals = _read_dictionary(directory / dict_name)
    partitions = [
        _from_records((directory / name).read_bytes(), width, directory / name)
        for name in files
    ]
    dataset = EncodedDataset(
        partitions, tbox, individuals, mode, materialization
    )
    _LOGGER.info(
        f"Loaded {len(dataset)} triples in {len(partitions)} partitions "
        f"from {directory}."
    )
    return dataset


def dataset_stats(ds) -> dict:
    """Summary counts of a dataset.

    :param EncodedDataset ds:  dataset
    :returns:  ordered dict of statistic name to value
    """
    frame = ds.frame()
    stats = {
        "mode": ds.mode.value,
        "materialization": ds.materialization.value,
        "width": ds.width,
        "partitions": len(ds.partitions),
        "triples": len(frame),
        "individuals": len(ds.individuals),
        "concepts": 0,
        "properties": 0,
        "concept_code_length": 0,
        "property_code_length": 0,
        "type_triples": 0,
    }
    if ds.tbox is not None:
        stats["concepts"] = len(ds.tbox.concepts)
        stats["properties"] = len(ds.tbox.properties)
        stats["concept_code_length"] = ds.tbox.concepts.code_length
        stats["property_code_length"] = ds.tbox.properties.code_length
    if len(frame) and (ds.tbox is not None or TYPE_N3 in ds.individuals.to_id):
        stats["type_triples"] = int((frame["p"] == ds.type_id).sum())
    return stats
