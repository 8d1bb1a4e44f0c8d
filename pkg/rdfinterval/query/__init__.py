"""SPARQL subset: parsing, planning, execution and rewriting."""
from .sparql import (
    Var,
    Const,
    TriplePattern,
    Disjunction,
    Query,
    parse_query,
)
from .plan import (
    PhysicalPlan,
    IntervalScan,
    HashJoin,
    Union,
    Project,
    Empty,
    Equals,
    NotEquals,
    InInterval,
    IsIn,
    locate_query,
    build_plan,
    plan_summary,
    format_plan,
)
from .engine import (
    ExecutionStats,
    ResultSet,
    execute,
    extract_results,
    format_rows,
)
from .rewrite import rewrite_query, rewrite_disjunctive, pattern_alternatives
