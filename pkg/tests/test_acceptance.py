"""End-to-end acceptance scenarios at desk scale."""
import time
import numpy as np
import pytest
from rdfinterval.dataset import (
    EncodingMode,
    decode_dataset,
    encode_dataset,
    split_partitions,
)
from rdfinterval.hierarchy import (
    EntityKind,
    assign_codes,
    encode_tbox,
    is_descendant_or_self,
)
from rdfinterval.materialize import full_materialize, lite_materialize, msc
from rdfinterval.query import (
    ExecutionStats,
    build_plan,
    execute,
    extract_results,
    locate_query,
    parse_query,
    plan_summary,
    rewrite_query,
)
from rdfinterval.rdf import (
    RDF_TYPE,
    declared_terms,
    discover_schema_terms,
    extract_schema,
)
from rdfinterval.testkit import (
    LUBM_QUERIES,
    MiniLubmSpec,
    gen_mini_lubm,
    gen_random_hierarchy,
    gen_random_kb,
    oracle_answer,
    oracle_entails,
)
from conftest import EX, encode_kb, ex


pytestmark = pytest.mark.acceptance
HIERARCHY_SIZES = np.geomspace(2, 10**4, 100).astype(int).tolist()


def answer(query, ds, entailment) -> set:
    plan = build_plan(locate_query(query, ds), ds.tbox, entailment)
    return set(extract_results(execute(plan, ds).distinct(), ds))


@pytest.fixture(scope="module")
def university():
    """Encoded university KB: (axioms, instance triples, dataset)."""
    schema, abox = gen_mini_lubm(MiniLubmSpec(5, 3, 10, 20))
    axioms = extract_schema(schema)
    tbox = encode_tbox(axioms, *declared_terms(schema))
    ds = encode_dataset(split_partitions(abox, 4), tbox)
    return axioms, abox, ds


def test_example_end_to_end(example_dataset):
    lite, _ = lite_materialize(example_dataset)
    query = parse_query(
        f"SELECT ?x WHERE {{ ?x <{RDF_TYPE}> <{EX}FacultyMember> }}"
    )
    assert answer(query, lite, True) == {(ex("bernd"),), (ex("hubert"),)}


@pytest.mark.parametrize("seed, n", enumerate(HIERARCHY_SIZES))
def test_subsumption_equivalence(seed, n):
    dag_probability = 0.0 if seed % 2 else 0.2
    hierarchy = gen_random_hierarchy(n, 3.0, dag_probability, seed=seed)
    table, residual = assign_codes(hierarchy.axioms, EntityKind.CONCEPT)
    codes = [table.code(iri) for iri in hierarchy.nodes]
    ancestors = [hierarchy.ancestors(node) for node in range(n)]
    if n <= 200:
        pairs = [(b, a) for b in range(n) for a in range(n)]
    else:
        rng = np.random.default_rng(seed)
        pairs = rng.integers(n, size=(10**5, 2)).tolist()
    mismatches = [
        (b, a)
        for b, a in pairs
        if is_descendant_or_self(codes[b].value, codes[a], residual)
        != (a in ancestors[b])
    ]
    assert mismatches == []


def test_msc_correctness():
    rng = np.random.default_rng(0)
    checked = 0
    for seed in range(20):
        hierarchy = gen_random_hierarchy(300, 3.0, 0.2, seed=seed)
        tbox = encode_tbox(hierarchy.axioms)
        values = [tbox.concepts.code(iri).value for iri in hierarchy.nodes]
        ancestors = [hierarchy.ancestors(node) for node in range(len(values))]
        for _ in range(500):
            picked = set(
                rng.choice(len(values), size=int(rng.integers(1, 10))).tolist()
            )
            minimal = {
                values[c]
                for c in picked
                if not any(d != c and c in ancestors[d] for d in picked)
            }
            assert msc({values[c] for c in picked}, tbox) == minimal
            checked += 1
    assert checked == 10**4


@pytest.mark.parametrize("seed", range(50))
def test_materialization_soundness(seed):
    kb = gen_random_kb(
        seed=seed,
        concepts=10 + seed,
        properties=4 + seed // 5,
        individuals=20 + 2 * seed,
        triples=100 + 20 * seed,
    )
    ds = encode_kb(kb.axioms, kb.triples, partitions=1 + seed % 4)
    full, _ = full_materialize(ds)
    expected = oracle_entails(kb.triples, kb.axioms, seed)
    assert set(decode_dataset(full)) == expected
    lite, _ = lite_materialize(ds)
    through_lite, _ = full_materialize(lite)
    type_id = ds.tbox.type_id

    def type_rows(dataset):
        frame = dataset.frame()
        return set(frame[frame["p"] == type_id].itertuples(index=False))

    assert type_rows(through_lite) == type_rows(full)


@pytest.mark.parametrize("name", sorted(LUBM_QUERIES))
def test_three_way_completeness(university, name):
    axioms, abox, ds = university
    query = parse_query(LUBM_QUERIES[name])
    lite, _ = lite_materialize(ds)
    full, _ = full_materialize(ds)
    interval = answer(query, lite, True)
    direct = answer(query, full, False)
    rewritten = answer(rewrite_query(query, ds.tbox), ds, False)
    assert interval
    assert interval == direct == rewritten
    assert interval == oracle_answer(query, abox, axioms)


def test_rewrite_listing_sizes(university):
    _, _, ds = university
    for name, branches in (("Q1", 8), ("Q2", 3)):
        rewritten = rewrite_query(parse_query(LUBM_QUERIES[name]), ds.tbox)
        assert len(rewritten.branches) == branches


@pytest.mark.parametrize("partitions", [1, 4, 16])
def test_round_trip_large(partitions):
    _, abox = gen_mini_lubm(MiniLubmSpec(26, 20, 10, 20, seed=1))
    assert len(abox) >= 10**5
    schema_free = encode_kb([], abox, partitions)
    assert len(schema_free.partitions) == partitions
    assert set(decode_dataset(schema_free)) == set(abox)


def test_single_comparison_matching(university):
    _, _, ds = university
    query = parse_query(LUBM_QUERIES["Q1"])
    plan = build_plan(locate_query(query, ds), ds.tbox)
    summary = plan_summary(plan)
    assert (summary["scans"], summary["interval_predicates"]) == (1, 1)
    stats = ExecutionStats()
    execute(plan, ds, stats=stats)
    assert stats.scans == 1
    rewritten = rewrite_query(query, ds.tbox)
    union = build_plan(locate_query(rewritten, ds), ds.tbox, False)
    assert plan_summary(union)["scans"] == 8
    union_stats = ExecutionStats()
    execute(union, ds, stats=union_stats)
    assert union_stats.scans == 8
    assert union_stats.rows_scanned == 8 * stats.rows_scanned


def test_ontology_encoding_faster():
    kb = gen_random_kb(
        seed=11,
        concepts=300,
        properties=30,
        individuals=20000,
        triples=150000,
        type_ratio=0.4,
    )
    typed = sum(triple.p.lexical == RDF_TYPE for triple in kb.triples)
    assert typed >= 0.3 * len(kb.triples)
    tbox = encode_tbox(kb.axioms, *discover_schema_terms(kb.triples))
    partitions = split_partitions(kb.triples, 4)

    def best_time(mode) -> float:
        timings = []
        for _ in range(5):
            start = time.perf_counter()
            encode_dataset(partitions, tbox, mode=mode)
            timings.append(time.perf_counter() - start)
        return min(timings)

    assert best_time(EncodingMode.OBE) < best_time(EncodingMode.SAE)
