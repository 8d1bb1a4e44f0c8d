"""Encode, materialize and query RDF knowledge bases."""
import argparse
import logging
import sys
import time
from pathlib import Path
import pandas as pd
from . import __version__
from .config import RunConfig
from .dataset import (
    EncodingMode,
    Materialization,
    dataset_stats,
    decode_dataset,
    encode_dataset,
    load_dataset,
    save_dataset,
    split_partitions,
)
from .errors import RdfIntervalError
from .fileio import atomic_open
from .hierarchy import EntityKind, encode_tbox, load_tbox, serialize_tbox
from .materialize import full_materialize, lite_materialize
from .query import (
    build_plan,
    execute,
    extract_results,
    format_plan,
    format_rows,
    locate_query,
    parse_query,
    rewrite_disjunctive,
    rewrite_query,
)
from .rdf import (
    ParseStats,
    declared_terms,
    discover_schema_terms,
    extract_schema,
    read_ntriples,
    write_ntriples,
)
from .rdf.schema import AXIOM_PREDICATES
from .testkit import LUBM_QUERIES, MiniLubmSpec, gen_mini_lubm


_LOGGER = logging.getLogger(__name__)
TBOX_OUTPUT = Path("tbox.txt")
SCHEMA_OUTPUT = "schema.nt"
ABOX_OUTPUT = "abox.nt"
BENCHMARK_OUTPUT = Path("benchmark.xlsx")
QUERY_MODES = ["litemat", "rewrite", "direct"]
DEFAULT_UNIVERSITIES = 1
DEFAULT_DEPARTMENTS = 3
DEFAULT_PROFESSORS = 10
DEFAULT_STUDENTS = 20
DEFAULT_SEED = 0


def build_parser() -> argparse.ArgumentParser:
    """Build an argument parser."""
    parser = argparse.ArgumentParser(
        "rdfinterval",
        description=(
            "Encode RDF knowledge bases with hierarchical interval codes, "
            "materialize RDFS types and answer SPARQL basic graph patterns."
        ),
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        "--log-level",
        help="Output verbosity",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default="INFO",
    )
    parser.add_argument(
        "--partitions",
        help=(
            "Number of logical data partitions (default: "
            "LITEMAT_PARTITIONS or the number of cores)."
        ),
        type=int,
    )
    parser.add_argument(
        "--max-width",
        help=(
            "Maximum code width in bits (default: LITEMAT_MAX_WIDTH "
            "or 128)."
        ),
        type=int,
        dest="max_code_width",
    )
    parser.add_argument(
        "--broadcast-threshold",
        help=(
            "Largest dictionary (entries) replicated to every partition "
            "instead of shuffled (default: LITEMAT_BCAST_THRESHOLD "
            "or 10^6)."
        ),
        type=int,
    )
    subparsers = parser.add_subparsers(description="sub-command help")

    tbox_parser = subparsers.add_parser(
        "encode-tbox",
        help="Encode the concept and property hierarchies of a schema.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    tbox_parser.add_argument("--do-encode-tbox", help=argparse.SUPPRESS)
    tbox_parser.add_argument("schema_path", help="Schema N-Triples file")
    tbox_parser.add_argument(
        "--abox",
        help=(
            "Instance N-Triples files scanned for predicates and types "
            "missing from the schema (may be repeated)."
        ),
        action="append",
        default=[],
        dest="abox_paths",
    )
    tbox_parser.add_argument(
        "--output-path",
        help="Path for the TBox encoding.",
        default=TBOX_OUTPUT,
        dest="tbox_output_path",
    )

    encode_parser = subparsers.add_parser(
        "encode",
        help="Dictionary-encode instance triples into a dataset directory.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    encode_parser.add_argument("--do-encode", help=argparse.SUPPRESS)
    encode_parser.add_argument("abox_path", help="Instance N-Triples file")
    encode_parser.add_argument("output_dir", help="Dataset directory")
    encode_parser.add_argument(
        "--tbox",
        help="TBox encoding (required for ontology-based encoding).",
        dest="tbox_path",
    )
    encode_parser.add_argument(
        "--mode",
        help=(
            "obe: schema terms take their interval codes; sae: every term "
            "goes to one plain dictionary."
        ),
        choices=[mode.value for mode in EncodingMode],
        default=EncodingMode.OBE.value,
        dest="encoding_mode",
    )
    encode_parser.add_argument(
        "--lenient",
        help="Skip malformed lines instead of failing.",
        action="store_true",
    )
    encode_parser.add_argument(
        "--partitions",
        help="Number of partitions, overriding the global option.",
        type=int,
        dest="encode_partitions",
    )

    materialize_parser = subparsers.add_parser(
        "materialize",
        help="Write a lite or fully materialized copy of a dataset.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    materialize_parser.add_argument("--do-materialize", help=argparse.SUPPRESS)
    materialize_parser.add_argument("dataset_dir", help="Input dataset")
    materialize_parser.add_argument("output_dir", help="Output dataset")
    materialize_parser.add_argument(
        "--mode",
        help="Materialization strategy",
        choices=[Materialization.LITE.value, Materialization.FULL.value],
        default=Materialization.LITE.value,
        dest="materialization_mode",
    )

    query_parser = subparsers.add_parser(
        "query",
        help="Answer a SPARQL query over a dataset.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    query_parser.add_argument("--do-query", help=argparse.SUPPRESS)
    query_parser.add_argument("dataset_dir", help="Dataset directory")
    query_parser.add_argument("query_path", help="SPARQL query file")
    query_parser.add_argument(
        "--mode",
        help=(
            "litemat: interval predicates over lite or unmaterialized "
            "data; rewrite: expand the query with sub-entity UNIONs; "
            "direct: exact matching (for fully materialized data)."
        ),
        choices=QUERY_MODES,
        default="litemat",
        dest="query_mode",
    )
    query_parser.add_argument(
        "--base", help="Base IRI for relative and bare names."
    )
    query_parser.add_argument(
        "--disjunctive",
        help="With --mode rewrite, expand each pattern in place.",
        action="store_true",
    )
    query_parser.add_argument(
        "--prune-empty",
        help="Skip the rest of a conjunction once an input is empty.",
        action="store_true",
    )
    query_parser.add_argument(
        "--format",
        help="Result cell syntax",
        choices=["tsv", "nt"],
        default="tsv",
        dest="result_format",
    )
    query_parser.add_argument(
        "--explain",
        help="Log the physical plan.",
        action="store_true",
    )

    decode_parser = subparsers.add_parser(
        "decode",
        help="Write the triples of a dataset as N-Triples.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    decode_parser.add_argument("--do-decode", help=argparse.SUPPRESS)
    decode_parser.add_argument("dataset_dir", help="Dataset directory")
    decode_parser.add_argument(
        "--output-path",
        help="N-Triples output path (standard output if omitted).",
        dest="decode_output_path",
    )

    stats_parser = subparsers.add_parser(
        "stats",
        help="Print dataset statistics.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    stats_parser.add_argument("--do-stats", help=argparse.SUPPRESS)
    stats_parser.add_argument("dataset_dir", help="Dataset directory")

    generate_parser = subparsers.add_parser(
        "generate",
        help="Write a generated university schema and instance data.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    generate_parser.add_argument("--do-generate", help=argparse.SUPPRESS)
    generate_parser.add_argument("output_dir", help="Output directory")
    _add_size_arguments(generate_parser)

    benchmark_parser = subparsers.add_parser(
        "benchmark",
        help=(
            "Compare encodings, materializations and query modes on "
            "generated university data."
        ),
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    benchmark_parser.add_argument("--do-benchmark", help=argparse.SUPPRESS)
    _add_size_arguments(benchmark_parser)
    benchmark_parser.add_argument(
        "--output-path",
        help="Report path (.xlsx for Excel, anything else for TSV).",
        default=BENCHMARK_OUTPUT,
        dest="benchmark_output_path",
    )
    return parser


def _add_size_arguments(parser):
    parser.add_argument(
        "--universities", type=int, default=DEFAULT_UNIVERSITIES
    )
    parser.add_argument(
        "--departments",
        help="Departments per university",
        type=int,
        default=DEFAULT_DEPARTMENTS,
    )
    parser.add_argument(
        "--professors",
        help="Professors per department",
        type=int,
        default=DEFAULT_PROFESSORS,
    )
    parser.add_argument(
        "--students",
        help="Students per department",
        type=int,
        default=DEFAULT_STUDENTS,
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _size_spec(args) -> MiniLubmSpec:
    return MiniLubmSpec(
        args.universities,
        args.departments,
        args.professors,
        args.students,
        args.seed,
    )


def report(*fields):
    """Print a machine-readable ``#report`` line on standard output."""
    print("#report", *fields, flush=True)


def report_time(command, seconds):
    """Print a machine-readable ``#time`` line on standard output."""
    print(f"#time {command} {seconds:.6f}", flush=True)


def read_triples(path, lenient=False) -> list:
    """Read an N-Triples file, logging skipped lines in lenient mode.

    :param path:  input path
    :param bool lenient:  skip malformed lines
    :returns:  list of triples
    """
    stats = ParseStats()
    triples = list(read_ntriples(path, strict=not lenient, stats=stats))
    if stats.skipped:
        _LOGGER.warning(f"Skipped {stats.skipped} malformed lines in {path}.")
    _LOGGER.info(f"Read {len(triples)} triples from {path}.")
    return triples


def build_tbox(schema, aboxes, config):
    """Encode a schema, adding entities declared or used in instance data.

    :param list schema:  schema triples
    :param list aboxes:  lists of instance triples
    :param RunConfig config:  run configuration
    :returns:  TBox encoding
    """
    axioms = extract_schema(schema)
    concepts, properties = declared_terms(schema)
    for abox in aboxes:
        found_concepts, found_properties = discover_schema_terms(abox)
        concepts += found_concepts
        properties += found_properties
    return encode_tbox(
        axioms, concepts, properties, max_width=config.max_code_width
    )


def instance_triples(triples) -> list:
    """Drop schema axiom triples from an instance stream."""
    kept = [t for t in triples if t.p.lexical not in AXIOM_PREDICATES]
    if len(kept) < len(triples):
        _LOGGER.warning(
            f"Ignoring {len(triples) - len(kept)} schema axiom triples in "
            f"the instance data."
        )
    return kept


def encode_triples(triples, tbox, mode, config):
    """Partition and encode triples.

    :returns:  (encoded dataset, seconds)
    """
    start_time = time.perf_counter()
    partitions = split_partitions(triples, config.partitions)
    ds = encode_dataset(
        partitions,
        tbox,
        config.partitions,
        mode,
        config.broadcast_threshold,
    )
    return ds, time.perf_counter() - start_time


def answer_query(
    query, ds, mode, disjunctive=False, prune_empty=False, explain=False
) -> tuple:
    """Answer a parsed query in one of the three query modes.

    :param Query query:  parsed query
    :param EncodedDataset ds:  dataset
    :param str mode:  ``litemat``, ``rewrite`` or ``direct``
    :param bool disjunctive:  use per-pattern alternatives when rewriting
    :param bool prune_empty:  short-circuit empty conjunctions
    :param bool explain:  log the plan
    :returns:  (sorted distinct decoded rows, number of UNION branches,
        seconds)
    """
    start_time = time.perf_counter()
    if mode == "rewrite" and ds.tbox is not None:
        if disjunctive:
            query = rewrite_disjunctive(query, ds.tbox)
        else:
            query = rewrite_query(query, ds.tbox)
    located = locate_query(query, ds)
    plan = build_plan(located, ds.tbox, entailment=mode == "litemat")
    if explain:
        _LOGGER.info(f"Plan:\n{format_plan(plan)}")
    results = execute(plan, ds, prune_empty=prune_empty).distinct()
    rows = sorted(extract_results(results, ds), key=_row_key)
    return rows, len(query.branches), time.perf_counter() - start_time


def _row_key(row):
    return tuple(term.n3() for term in row)


def _check_query_mode(mode, ds):
    if ds.tbox is None and mode != "direct":
        _LOGGER.warning(
            f"{mode} mode needs a TBox; the SAE dataset is matched exactly."
        )
    elif mode == "direct" and ds.materialization is not Materialization.FULL:
        _LOGGER.warning(
            f"Direct matching over {ds.materialization.value} "
            f"materialization may miss entailed answers."
        )
    elif mode == "litemat" and ds.materialization is Materialization.FULL:
        _LOGGER.info("Interval matching over fully materialized data.")


def do_encode_tbox(args, config):
    """Encode a schema into a TBox file.

    :param argparse.Namespace args:  command-line arguments
    :param RunConfig config:  run configuration
    """
    start_time = time.perf_counter()
    schema = read_triples(args.schema_path)
    aboxes = [read_triples(path) for path in args.abox_paths]
    tbox = build_tbox(schema, aboxes, config)
    output_path = Path(args.tbox_output_path)
    _LOGGER.info(f"Writing TBox encoding to {output_path}.")
    with atomic_open(output_path) as tbox_file:
        tbox_file.write(serialize_tbox(tbox))
    for kind in EntityKind:
        table = tbox.table(kind)
        report(
            kind.value,
            f"entities={len(table.by_label)}",
            f"codes={len(table)}",
            f"code_length={table.code_length}",
        )
    report_time("encode-tbox", time.perf_counter() - start_time)


def do_encode(args, config):
    """Encode instance triples into a dataset directory.

    :param argparse.Namespace args:  command-line arguments
    :param RunConfig config:  run configuration
    """
    mode = EncodingMode(args.encoding_mode)
    tbox = None
    if mode is EncodingMode.OBE:
        if args.tbox_path is None:
            err = "Ontology-based encoding needs --tbox."
            raise RdfIntervalError(err)
        tbox = load_tbox(Path(args.tbox_path).read_text(encoding="utf-8"))
    triples = instance_triples(read_triples(args.abox_path, args.lenient))
    ds, seconds = encode_triples(triples, tbox, mode, config)
    save_dataset(ds, args.output_dir)
    throughput = len(triples) / seconds if seconds > 0 else 0.0
    report(mode.value, f"triples={len(ds)}", f"throughput={throughput:.1f}")
    report_time("encode", seconds)


def do_materialize(args, config):
    """Materialize a dataset into a new directory.

    :param argparse.Namespace args:  command-line arguments
    :param RunConfig config:  run configuration
    """
    ds = load_dataset(args.dataset_dir)
    if ds.materialization is not Materialization.NONE:
        _LOGGER.warning(
            f"Input is already {ds.materialization.value}-materialized."
        )
    if args.materialization_mode == Materialization.LITE.value:
        result, outcome = lite_materialize(ds)
    else:
        result, outcome = full_materialize(ds)
    save_dataset(result, args.output_dir)
    report(outcome.line())
    report_time("materialize", outcome.duration_seconds)


def do_query(args, config):
    """Answer a query and print the rows.

    :param argparse.Namespace args:  command-line arguments
    :param RunConfig config:  run configuration
    """
    ds = load_dataset(args.dataset_dir)
    _check_query_mode(args.query_mode, ds)
    text = Path(args.query_path).read_text(encoding="utf-8")
    query = parse_query(text, base=args.base)
    rows, branches, seconds = answer_query(
        query,
        ds,
        args.query_mode,
        disjunctive=args.disjunctive,
        prune_empty=args.prune_empty,
        explain=args.explain,
    )
    for line in format_rows(rows, query.projection, args.result_format):
        print(line)
    report(args.query_mode, f"branches={branches}", f"rows={len(rows)}")
    report_time("query", seconds)


def do_decode(args, config):
    """Decode a dataset to N-Triples.

    :param argparse.Namespace args:  command-line arguments
    :param RunConfig config:  run configuration
    """
    ds = load_dataset(args.dataset_dir)
    triples = decode_dataset(ds)
    if args.decode_output_path is None:
        write_ntriples(triples, sys.stdout.buffer)
        sys.stdout.buffer.flush()
    else:
        with atomic_open(args.decode_output_path, "wb") as output_file:
            write_ntriples(triples, output_file)
    _LOGGER.info(f"Decoded {len(triples)} triples.")


def do_stats(args, config):
    """Print dataset statistics as ``name<TAB>value`` lines.

    :param argparse.Namespace args:  command-line arguments
    :param RunConfig config:  run configuration
    """
    ds = load_dataset(args.dataset_dir)
    for name, value in dataset_stats(ds).items():
        print(f"{name}\t{value}")


def do_generate(args, config):
    """Write a generated schema and instance data.

    :param argparse.Namespace args:  command-line arguments
    :param RunConfig config:  run configuration
    """
    spec = _size_spec(args)
    schema, abox = gen_mini_lubm(spec)
    output_dir = Path(args.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    for name, triples in ((SCHEMA_OUTPUT, schema), (ABOX_OUTPUT, abox)):
        _LOGGER.info(f"Writing {len(triples)} triples to {output_dir / name}.")
        with atomic_open(output_dir / name, "wb") as output_file:
            write_ntriples(triples, output_file)
    report(f"schema={len(schema)}", f"abox={len(abox)}")


def run_benchmark(spec, config) -> pd.DataFrame:
    """Time encodings, materializations and queries on generated data.

    :param MiniLubmSpec spec:  dataset size
    :param RunConfig config:  run configuration
    :returns:  one row per measurement
    """
    schema, abox = gen_mini_lubm(spec)
    tbox = build_tbox(schema, [abox], config)
    rows = []
    datasets = {}
    for mode in EncodingMode:
        ds, seconds = encode_triples(abox, tbox, mode, config)
        datasets[mode] = ds
        rows.append(
            {
                "Stage": "encode",
                "Mode": mode.value,
                "Triples": len(ds),
                "Seconds": seconds,
                "Throughput (triples/s)": len(abox) / seconds
                if seconds > 0
                else 0.0,
            }
        )
    original = datasets[EncodingMode.OBE]
    lite, lite_report = lite_materialize(original)
    full, full_report = full_materialize(original)
    for outcome in (lite_report, full_report):
        rows.append(
            {
                "Stage": "materialize",
                "Mode": outcome.mode,
                "Triples": outcome.output_triples,
                "Seconds": outcome.duration_seconds,
                "Added": outcome.triples_added,
                "Deleted": outcome.triples_deleted,
            }
        )
    targets = {"litemat": lite, "direct": full, "rewrite": original}
    for name, text in LUBM_QUERIES.items():
        query = parse_query(text)
        answers = {}
        for mode, ds in targets.items():
            result, branches, seconds = answer_query(query, ds, mode)
            answers[mode] = result
            rows.append(
                {
                    "Stage": "query",
                    "Mode": mode,
                    "Query": name,
                    "Seconds": seconds,
                    "Rows": len(result),
                    "Branches": branches,
                }
            )
        reference = answers["litemat"]
        agrees = all(found == reference for found in answers.values())
        for row in rows[-len(targets):]:
            row["Agrees"] = agrees
        if not agrees:
            _LOGGER.error(f"Query modes disagree on {name}.")
    return pd.DataFrame(rows)


def do_benchmark(args, config):
    """Run the benchmark and write the report table.

    :param argparse.Namespace args:  command-line arguments
    :param RunConfig config:  run configuration
    """
    start_time = time.perf_counter()
    df = run_benchmark(_size_spec(args), config)
    output_path = Path(args.benchmark_output_path)
    _LOGGER.info(f"Writing benchmark results to {output_path}.")
    if output_path.suffix == ".xlsx":
        df.to_excel(output_path, index=False)
    else:
        df.to_csv(output_path, sep="\t", index=False)
    for row in df.itertuples(index=False):
        report_time(f"{row.Stage}-{row.Mode}", row.Seconds)
    report_time("benchmark", time.perf_counter() - start_time)


COMMANDS = {
    "do_encode_tbox": do_encode_tbox,
    "do_encode": do_encode,
    "do_materialize": do_materialize,
    "do_query": do_query,
    "do_decode": do_decode,
    "do_stats": do_stats,
    "do_generate": do_generate,
    "do_benchmark": do_benchmark,
}


def main(args=None) -> int:
    """Main driver.

    :param list args:  optional list of arguments for argparse (for testing)
    :returns:  exit status
    """
    parser = build_parser()
    if args is None:
        args = parser.parse_args()
    else:
        args = parser.parse_args(args)
    logging.basicConfig(level=getattr(logging, args.log_level, "INFO"))
    _LOGGER.debug(f"Got arguments: {args}.")
    partitions = getattr(args, "encode_partitions", None)
    if partitions is None:
        partitions = args.partitions
    try:
        config = RunConfig.from_env(
            partitions=partitions,
            max_code_width=args.max_code_width,
            broadcast_threshold=args.broadcast_threshold,
        )
    except ValueError as error:
        parser.error(str(error))
    for flag, command in COMMANDS.items():
        if hasattr(args, flag):
            break
    else:
        _LOGGER.error("No command specified.")
        parser.print_help()
        return 2
    try:
        command(args, config)
    except RdfIntervalError as error:
        _LOGGER.error(f"{type(error).__name__}: {error}")
        return 1
    except OSError as error:
        _LOGGER.error(f"{type(error).__name__}: {error}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
