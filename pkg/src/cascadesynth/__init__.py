"""Synthesis of string-rewrite cascades from examples, plus logical rule induction over train facts."""

from .diff import align, exact_fixes, extract_candidates, solve_replacement
from .dsl import (
    Cascade,
    Example,
    ReplaceOp,
    Task,
    TaskMeta,
    apply_cascade,
    apply_op,
    cascade_from_json,
    cascade_search_space,
    cascade_to_json,
    complexity,
    count_programs,
    trace_cascade,
)
from .hybrid import (
    PricingConfig,
    RunLedger,
    compression_budget,
    compute_cost,
    hybrid_solve,
    make_fallback,
)
from .metrics import CorpusReport, aggregate, edit_similarity, reward, score_task
from .slr import (
    Literal,
    Rule,
    SlrTask,
    count_rule_candidates,
    eval_rule,
    induce_rule,
    normalize,
    parse_facts,
    render_rule,
)
from .solvers import ALL, STRATEGIES, SolveResult, StrategyConfig, solve, solve_ensemble
from .taskgen import GenSpec, classify_bfcc, generate_slr_instance, generate_task

__version__ = "0.1.0"

__all__ = [
    "ALL",
    "STRATEGIES",
    "Cascade",
    "CorpusReport",
    "Example",
    "GenSpec",
    "Literal",
    "PricingConfig",
    "ReplaceOp",
    "Rule",
    "RunLedger",
    "SlrTask",
    "SolveResult",
    "StrategyConfig",
    "Task",
    "TaskMeta",
    "aggregate",
    "align",
    "apply_cascade",
    "apply_op",
    "cascade_from_json",
    "cascade_search_space",
    "cascade_to_json",
    "classify_bfcc",
    "complexity",
    "compression_budget",
    "compute_cost",
    "count_programs",
    "count_rule_candidates",
    "edit_similarity",
    "eval_rule",
    "exact_fixes",
    "extract_candidates",
    "generate_slr_instance",
    "generate_task",
    "hybrid_solve",
    "induce_rule",
    "make_fallback",
    "normalize",
    "parse_facts",
    "render_rule",
    "reward",
    "score_task",
    "solve",
    "solve_ensemble",
    "solve_replacement",
    "trace_cascade",
]
