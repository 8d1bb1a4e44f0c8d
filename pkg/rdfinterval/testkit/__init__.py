"""Generators, the bundled university schema and brute-force oracles."""
from .lubm import LUBM_QUERIES, UB, schema_triples
from .generators import (
    MiniLubmSpec,
    RandomHierarchy,
    RandomKb,
    gen_mini_lubm,
    gen_random_hierarchy,
    gen_random_kb,
    mini_lubm_triple_count,
)
from .oracle import ClosureOracle, oracle_answer, oracle_entails
