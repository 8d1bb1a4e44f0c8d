"""Test lite and full materialization."""
import numpy as np
import pytest
from rdfinterval.dataset import (
    EncodingMode,
    Materialization,
    decode_dataset,
    encode_dataset,
    split_partitions,
)
from rdfinterval.errors import UnknownConceptError, UnsupportedDatasetError
from rdfinterval.hierarchy import EntityKind, encode_tbox
from rdfinterval.materialize import (
    MaterializationReport,
    full_materialize,
    lite_materialize,
    msc,
)
from rdfinterval.rdf import RDF_TYPE, AxiomKind, SchemaAxiom, Term, Triple
from rdfinterval.testkit import (
    gen_random_hierarchy,
    gen_random_kb,
    oracle_entails,
)
from conftest import encode_kb, ex, type_triple


def type_rows(triples) -> set:
    return {triple for triple in triples if triple.p.lexical == RDF_TYPE}


def test_example_lite(example_dataset, example_triples):
    lite, report = lite_materialize(example_dataset)
    assert lite.materialization is Materialization.LITE
    assert (report.mode, report.triples_added, report.triples_deleted) == (
        "lite",
        1,
        0,
    )
    assert report.input_triples == 2
    assert report.output_triples == 3
    assert set(decode_dataset(lite)) == set(example_triples) | {
        type_triple("hubert", "FacultyMember")
    }
    assert example_dataset.materialization is Materialization.NONE


def test_example_full(example_dataset, example_triples):
    full, report = full_materialize(example_dataset)
    assert full.materialization is Materialization.FULL
    assert (report.triples_added, report.triples_deleted) == (2, 0)
    assert set(decode_dataset(full)) == set(example_triples) | {
        type_triple("hubert", "FacultyMember"),
        type_triple("bernd", "FacultyMember"),
    }


def test_lite_drops_redundant_types(example_axioms):
    triples = [
        type_triple("bernd", "Professor"),
        type_triple("bernd", "FacultyMember"),
        Triple(ex("bernd"), ex("teaches"), ex("course1")),
    ]
    lite, report = lite_materialize(encode_kb(example_axioms, triples))
    assert (report.triples_added, report.triples_deleted) == (0, 1)
    assert report.net == -1
    expected = {type_triple("bernd", "Professor")}
    assert type_rows(decode_dataset(lite)) == expected


def test_report_line():
    report = MaterializationReport("lite", 5, 2, 1.5, 100)
    assert report.line() == "lite 5 2 1.500 5.00% 2.00% 3"
    assert MaterializationReport("full", 0, 0, 0.0).line() == (
        "full 0 0 0.000 0.00% 0.00% 0"
    )


def test_sae_rejected(example_triples):
    ds = encode_dataset([example_triples], None, mode=EncodingMode.SAE)
    with pytest.raises(UnsupportedDatasetError):
        lite_materialize(ds)
    with pytest.raises(UnsupportedDatasetError):
        full_materialize(ds)


def test_empty_dataset(example_tbox):
    ds = encode_dataset([[]], example_tbox)
    lite, report = lite_materialize(ds)
    assert len(lite) == 0
    assert report.triples_added == 0
    full, report = full_materialize(ds)
    assert len(full) == 0


def test_msc_unknown_concept(example_tbox):
    with pytest.raises(UnknownConceptError):
        msc({7}, example_tbox)


def msc_reference(candidates, hierarchy, index_of) -> set:
    """Candidates with no strict subconcept among the candidates."""
    kept = set()
    for c in candidates:
        strict = [
            d
            for d in candidates
            if d != c and index_of[c] in hierarchy.ancestors(index_of[d])
        ]
        if not strict:
            kept.add(c)
    return kept


@pytest.mark.parametrize("dag_probability", [0.0, 0.3])
def test_msc_matches_reference(dag_probability):
    hierarchy = gen_random_hierarchy(80, 3.0, dag_probability, seed=11)
    tbox = encode_tbox(hierarchy.axioms)
    values = [tbox.concepts.code(iri).value for iri in hierarchy.nodes]
    index_of = {value: index for index, value in enumerate(values)}
    rng = np.random.default_rng(5)
    for _ in range(300):
        size = int(rng.integers(1, 8))
        picked = rng.choice(len(values), size=size, replace=False)
        candidates = {values[index] for index in picked}
        assert msc(candidates, tbox) == msc_reference(
            candidates, hierarchy, index_of
        )


def test_msc_ignores_order(lubm_kb):
    _, _, tbox = lubm_kb
    values = list(tbox.concepts.by_value)
    rng = np.random.default_rng(2)
    for _ in range(50):
        picked = [int(value) for value in rng.choice(values, size=5)]
        assert msc(picked, tbox) == msc(list(reversed(picked)), tbox)
        assert msc(msc(picked, tbox), tbox) == msc(picked, tbox)


@pytest.mark.parametrize("seed", range(6))
def test_full_matches_oracle(seed):
    kb = gen_random_kb(seed=seed, dag_probability=0.25)
    ds = encode_kb(kb.axioms, kb.triples, partitions=3)
    full, report = full_materialize(ds, workers=2)
    closure = oracle_entails(kb.triples, kb.axioms, seed=seed)
    assert set(decode_dataset(full)) == closure
    assert report.output_triples == len(closure)


@pytest.mark.parametrize("seed", range(6))
def test_full_after_lite(seed):
    kb = gen_random_kb(seed=seed)
    ds = encode_kb(kb.axioms, kb.triples)
    lite, _ = lite_materialize(ds)
    direct, _ = full_materialize(ds)
    through_lite, _ = full_materialize(lite)
    assert set(decode_dataset(through_lite)) == set(decode_dataset(direct))
    lite_types = type_rows(decode_dataset(lite))
    assert lite_types <= type_rows(decode_dataset(direct))


@pytest.mark.parametrize("seed", range(4))
def test_lite_types_are_minimal(seed):
    kb = gen_random_kb(seed=seed, dag_probability=0.3)
    ds = encode_kb(kb.axioms, kb.triples)
    lite, _ = lite_materialize(ds)
    tbox = ds.tbox
    by_subject = {}
    for triple in type_rows(decode_dataset(lite)):
        value = tbox.concepts.code(triple.o.lexical).value
        by_subject.setdefault(triple.s, set()).add(value)
    for values in by_subject.values():
        for a in values:
            for b in values - {a}:
                assert not tbox.subsumes(EntityKind.CONCEPT, a, b)


def test_literal_objects_not_typed():
    axioms = [SchemaAxiom(AxiomKind.RANGE, ex("name"), ex("Label"))]
    triples = [Triple(ex("bernd"), ex("name"), Term.literal("Bernd"))]
    ds = encode_kb(axioms, triples)
    full, report = full_materialize(ds)
    assert report.triples_added == 0
    lite, report = lite_materialize(ds)
    assert report.triples_added == 0
    assert set(decode_dataset(lite)) == set(triples)


def test_partition_count_kept(lubm_kb):
    _, abox, tbox = lubm_kb
    ds = encode_dataset(split_partitions(abox, 4), tbox)
    lite, _ = lite_materialize(ds)
    full, _ = full_materialize(ds)
    assert len(lite.partitions) == len(full.partitions) == 4
