"""Test dictionary encoding, decoding and dataset persistence."""
import pytest
from rdfinterval.dataset import (
    EncodingMode,
    Materialization,
    Namespace,
    dataset_stats,
    decode_dataset,
    encode_dataset,
    extract,
    load_dataset,
    locate,
    save_dataset,
    split_partitions,
)
from rdfinterval.errors import (
    FormatError,
    NotFoundError,
    UnknownSchemaTermError,
)
from rdfinterval.hierarchy import encode_tbox
from rdfinterval.rdf import (
    AxiomKind,
    RDF_TYPE,
    SchemaAxiom,
    Term,
    Triple,
    discover_schema_terms,
)
from conftest import EX, encode_kb, ex, type_triple


def rows(ds) -> set:
    return {
        tuple(int(value) for value in row)
        for row in ds.frame().itertuples(index=False)
    }


def test_split_partitions():
    parts = split_partitions(range(10), 3)
    assert [len(part) for part in parts] == [3, 3, 4]
    assert sum(parts, []) == list(range(10))
    assert split_partitions([], 2) == [[], []]


def test_example_encoding(example_dataset, example_tbox):
    ds = example_dataset
    assert len(ds) == 2
    assert len(ds.partitions) == 2
    assert len(ds.individuals) == 3
    bernd = ds.individuals.locate(ex("bernd"))
    hubert = ds.individuals.locate(ex("hubert"))
    course = ds.individuals.locate(ex("course1"))
    assert sorted(ds.individuals.to_term) == [0, 1, 2]
    assert ds.individuals.next_id == 3
    professor = example_tbox.concepts.code(EX + "Professor").value
    teaches = example_tbox.properties.code(EX + "teaches").value
    assert rows(ds) == {
        (bernd, example_tbox.type_id, professor),
        (hubert, teaches, course),
    }


def test_example_decoding(example_dataset, example_triples):
    assert set(decode_dataset(example_dataset)) == set(example_triples)


@pytest.mark.parametrize("partitions", [1, 4, 16])
def test_round_trip(lubm_kb, partitions):
    _, abox, tbox = lubm_kb
    ds = encode_dataset(split_partitions(abox, partitions), tbox)
    assert len(ds.partitions) == partitions
    assert set(decode_dataset(ds)) == set(abox)
    assert len(ds) == len(set(abox))


def test_shuffle_matches_broadcast(lubm_kb):
    _, abox, tbox = lubm_kb
    parts = split_partitions(abox, 3)
    broadcast = encode_dataset(parts, tbox, workers=1)
    shuffled = encode_dataset(parts, tbox, broadcast_threshold=0, workers=4)
    assert set(decode_dataset(shuffled)) == set(decode_dataset(broadcast))
    assert len(shuffled.individuals) == len(broadcast.individuals)


def test_output_partition_count(lubm_kb):
    _, abox, tbox = lubm_kb
    ds = encode_dataset(split_partitions(abox, 2), tbox, num_partitions=5)
    assert len(ds.partitions) == 5
    assert set(decode_dataset(ds)) == set(abox)


def test_duplicates_removed(example_tbox, example_triples):
    doubled = example_triples * 3
    ds = encode_dataset(split_partitions(doubled, 3), example_tbox)
    assert len(ds) == 2


def test_dense_ids(lubm_kb):
    _, abox, tbox = lubm_kb
    ds = encode_dataset(split_partitions(abox, 4), tbox)
    assert sorted(ds.individuals.to_term) == list(range(len(ds.individuals)))
    assert len(ds.individuals.to_id) == len(ds.individuals.to_term)
    assert ds.individuals.next_id == len(ds.individuals)


def test_sae_encoding(example_triples):
    parts = split_partitions(example_triples, 2)
    ds = encode_dataset(parts, None, mode=EncodingMode.SAE)
    assert ds.tbox is None
    assert len(ds.individuals) == 6
    assert ds.type_id == ds.individuals.locate(Term.iri(RDF_TYPE))
    assert set(decode_dataset(ds)) == set(example_triples)
    assert locate(ex("teaches"), ds) == (
        ds.individuals.locate(ex("teaches")),
        Namespace.INDIVIDUAL,
    )


def test_sae_matches_obe(lubm_kb):
    _, abox, tbox = lubm_kb
    parts = split_partitions(abox, 4)
    obe = encode_dataset(parts, tbox)
    sae = encode_dataset(parts, tbox, mode=EncodingMode.SAE)
    assert set(decode_dataset(sae)) == set(decode_dataset(obe))
    assert len(sae.individuals) > len(obe.individuals)


def test_unknown_schema_term(example_axioms):
    tbox = encode_tbox(example_axioms)
    likes = [Triple(ex("bernd"), ex("likes"), ex("hubert"))]
    with pytest.raises(UnknownSchemaTermError):
        encode_dataset([likes], tbox)
    typed = [type_triple("bernd", "Dean")]
    with pytest.raises(UnknownSchemaTermError):
        encode_dataset([typed], tbox)


def test_locate_and_extract(example_dataset, example_tbox):
    ds = example_dataset
    value, space = locate(ex("bernd"), ds)
    assert space is Namespace.INDIVIDUAL
    assert extract(value, space, ds) == ex("bernd")
    professor = example_tbox.concepts.code(EX + "Professor").value
    assert locate(ex("teaches"), ds) == (2, Namespace.PROPERTY)
    assert locate(ex("Professor"), ds) == (professor, Namespace.CONCEPT)
    assert locate(ex("Professor"), ds, Namespace.CONCEPT) == (
        professor,
        Namespace.CONCEPT,
    )
    assert extract(professor, Namespace.CONCEPT, ds) == ex("Professor")
    assert extract(2, Namespace.PROPERTY, ds) == ex("teaches")
    with pytest.raises(NotFoundError):
        locate(ex("nobody"), ds)
    with pytest.raises(NotFoundError):
        locate(ex("bernd"), ds, Namespace.CONCEPT)
    with pytest.raises(NotFoundError):
        extract(99, Namespace.INDIVIDUAL, ds)
    with pytest.raises(NotFoundError):
        extract(99, Namespace.CONCEPT, ds)


def test_stats(example_dataset):
    stats = dataset_stats(example_dataset)
    assert stats == {
        "mode": "obe",
        "materialization": "none",
        "width": 64,
        "partitions": 2,
        "triples": 2,
        "individuals": 3,
        "concepts": 3,
        "properties": 3,
        "concept_code_length": 3,
        "property_code_length": 3,
        "type_triples": 1,
    }


def test_save_load(tmp_path, lubm_kb):
    _, abox, tbox = lubm_kb
    ds = encode_dataset(split_partitions(abox, 3), tbox)
    manifest = save_dataset(ds, tmp_path / "data")
    assert manifest.name == "manifest.ini"
    loaded = load_dataset(tmp_path / "data")
    assert loaded.tbox == ds.tbox
    assert loaded.mode is EncodingMode.OBE
    assert loaded.materialization is Materialization.NONE
    assert loaded.individuals == ds.individuals
    assert len(loaded.partitions) == 3
    assert rows(loaded) == rows(ds)
    assert dataset_stats(loaded) == dataset_stats(ds)


def test_save_load_sae(tmp_path, example_triples):
    ds = encode_dataset([example_triples], None, mode=EncodingMode.SAE)
    save_dataset(ds, tmp_path)
    loaded = load_dataset(tmp_path)
    assert loaded.tbox is None
    assert loaded.mode is EncodingMode.SAE
    assert set(decode_dataset(loaded)) == set(example_triples)


def test_wide_codes(tmp_path):
    chain = [
        SchemaAxiom(AxiomKind.SUB_CLASS_OF, ex(f"C{i + 1}"), ex(f"C{i}"))
        for i in range(70)
    ]
    triples = [type_triple("deep", "C70"), type_triple("shallow", "C0")]
    ds = encode_kb(chain, triples)
    assert ds.tbox.concepts.code_length == 72
    assert ds.width == 72
    assert ds.tbox.concepts.code(EX + "C70").value >= 1 << 64
    assert set(decode_dataset(ds)) == set(triples)
    save_dataset(ds, tmp_path)
    loaded = load_dataset(tmp_path)
    assert loaded.width == 72
    assert rows(loaded) == rows(ds)
    assert set(decode_dataset(loaded)) == set(triples)


def test_load_errors(tmp_path, example_dataset):
    with pytest.raises(FormatError):
        load_dataset(tmp_path / "missing")
    save_dataset(example_dataset, tmp_path)
    part = tmp_path / "part-00000.bin"
    part.write_bytes(part.read_bytes() + b"\x00")
    with pytest.raises(FormatError):
        load_dataset(tmp_path)
    manifest = tmp_path / "manifest.ini"
    text = manifest.read_text(encoding="utf-8")
    manifest.write_text(
        text.replace("rdfinterval-dataset-1", "other-format"), encoding="utf-8"
    )
    with pytest.raises(FormatError):
        load_dataset(tmp_path)


def test_discovered_terms_encode(example_axioms):
    triples = [
        type_triple("x", "Visitor"),
        Triple(ex("x"), ex("likes"), ex("y")),
    ]
    concepts, properties = discover_schema_terms(triples)
    tbox = encode_tbox(example_axioms, concepts, properties)
    ds = encode_dataset([triples], tbox)
    assert set(decode_dataset(ds)) == set(triples)
