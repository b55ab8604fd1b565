"""Command-line entry point: ``python -m cascadesynth <command> ...``.

Every command is deterministic given its flags and input files.  Exit codes:
0 success, 1 usage error, 2 input parse error, 3 generation exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Callable, Iterable, Sequence, TextIO

from .dsl import Task, cascade_search_space, count_programs
from .hybrid import (
    FallbackGenerator,
    PricingConfig,
    RunLedger,
    compression_budget,
    compute_cost,
    hybrid_solve,
    make_fallback,
)
from .io import (
    RecordError,
    ResultRecord,
    dump_task,
    format_cost,
    read_slr_tasks,
    read_tasks,
)
from .metrics import CorpusReport, aggregate, score_task
from .slr import count_rule_candidates, external_score, induce_rule, render_rule
from .solvers import STRATEGIES, SolveResult, StrategyConfig, resolve, solve_ensemble
from .taskgen import GenerationExhausted, GenSpec, generate_task, planted_slr_task

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_EXHAUSTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for input parse errors here
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _int_range(text: str) -> tuple[int, int]:
    """``"3"`` or ``"2..5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        v = int(text)
        return v, v
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _decimal(text: str) -> Decimal:
    try:
        v = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"expected a decimal amount, got {text!r}") from None
    if v < 0 or not v.is_finite():
        raise argparse.ArgumentTypeError(f"expected a nonnegative amount, got {text!r}")
    return v


def _ratios(text: str) -> list[Fraction]:
    try:
        out = [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad ratio list {text!r}") from None
    if not out or any(r <= 0 for r in out):
        raise argparse.ArgumentTypeError("ratios must be positive")
    return out


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    d = StrategyConfig()
    g = p.add_argument_group("solver configuration")
    g.add_argument("--beam-width", type=_positive_int, default=d.beam_width)
    g.add_argument("--max-candidates", type=_positive_int, default=d.max_candidates_per_step)
    g.add_argument("--lookahead", type=int, choices=(0, 1, 2), default=d.lookahead)
    g.add_argument("--restarts", type=_positive_int, default=d.restarts)
    g.add_argument("--seed", type=int, default=d.seed)
    g.add_argument("--safety-mode", choices=("strict", "two_phase", "off"), default=d.safety_mode)
    g.add_argument("--perm-cap", type=_positive_int, default=d.perm_cap)
    g.add_argument("--max-context", type=int, default=d.max_context)
    g.add_argument("--completion-limit", type=int, default=d.completion_limit)
    which = p.add_mutually_exclusive_group()
    which.add_argument("--strategy", choices=sorted(STRATEGIES), help="run a single strategy")
    which.add_argument("--ensemble", default="all", help="'all' or a comma-separated strategy list")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--wrap-boundaries", action="store_true", help="wrap every string in '#...#' on load")


def _config(args: argparse.Namespace) -> StrategyConfig:
    try:
        return _make_config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _make_config(args: argparse.Namespace) -> StrategyConfig:
    return StrategyConfig(
        beam_width=args.beam_width,
        max_candidates_per_step=args.max_candidates,
        lookahead=args.lookahead,
        restarts=args.restarts,
        seed=args.seed,
        safety_mode=args.safety_mode,
        perm_cap=args.perm_cap,
        max_context=args.max_context,
        completion_limit=args.completion_limit,
    )


def _strategies(args: argparse.Namespace) -> tuple[str, ...]:
    try:
        return resolve(args.strategy or args.ensemble)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


@dataclass(frozen=True)
class _SolveJob:
    strategies: tuple[str, ...]
    cfg: StrategyConfig

    def __call__(self, task: Task) -> SolveResult:
        return solve_ensemble(task, self.strategies, self.cfg)


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    """Ordered map; results come back in input order for any worker count."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _group(task_by_id: dict[str, Task]) -> Callable:
    def key(score):
        meta = task_by_id[score.task_id].meta
        return meta.cascade_length if meta else None

    return key


def _report(tasks: Sequence[Task], programs: Sequence) -> CorpusReport:
    scores = [score_task(p, t) for p, t in zip(programs, tasks)]
    by_id = {t.task_id: t for t in tasks}
    has_len = any(t.meta and t.meta.cascade_length is not None for t in tasks)
    return aggregate(scores, _group(by_id) if has_len else None)


def _open_out(path: str | None, stdout: TextIO):
    if path is None or path == "-":
        return stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _emit(lines: Iterable[str], path: str | None, stdout: TextIO) -> None:
    fh, close = _open_out(path, stdout)
    try:
        for line in lines:
            fh.write(line + "\n")
    finally:
        if close:
            fh.close()


def _print_report(report: CorpusReport, title: str, as_json: bool, out: TextIO) -> None:
    out.write((report.to_json() if as_json else report.to_table(title)) + "\n")


def _result_record(task: Task, res: SolveResult) -> ResultRecord:
    return ResultRecord(
        task.task_id, res.success, res.reward, res.program, res.complexity, res.strategy_id
    )


def cmd_solve(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    job = _SolveJob(_strategies(args), _config(args))
    tasks = read_tasks(args.tasks, wrap=args.wrap_boundaries)
    results = _map(job, tasks, args.workers)
    _emit((_result_record(t, r).to_json() for t, r in zip(tasks, results)), args.out, stdout)
    if tasks:
        report = _report(tasks, [r.program for r in results])
        # the report goes to stderr when results occupy stdout
        target = stdout if args.out not in (None, "-") else stderr
        _print_report(report, "solve", args.json, target)
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    try:
        spec = GenSpec(
            alphabet=args.alphabet,
            cascade_length_range=args.cascade_len,
            n_examples=args.examples,
            string_length_range=args.string_len,
            seed=args.seed,
            wrap_boundaries=args.wrap_boundaries,
            max_programs=args.max_programs,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.count < 0:
        raise UsageError("--count must be >= 0")
    tasks = [generate_task(spec, i) for i in range(args.start, args.start + args.count)]
    _emit((dump_task(t) for t in tasks), args.out, stdout)
    return EXIT_OK


def cmd_gen_slr(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    lo, hi = args.complexity
    if not 1 <= lo <= hi <= 4:
        raise UsageError("--complexity must lie within 1..4")
    lines = []
    for i in range(args.count):
        comp = lo + i % (hi - lo + 1)
        task, rule = planted_slr_task(args.seed * 100_003 + i, comp, args.trains, args.max_cars)
        rec = json.loads(task.to_json())
        rec["task_id"] = f"slr-{args.seed}-{i:05d}"
        rec["planted"] = render_rule(rule)
        lines.append(json.dumps(rec, ensure_ascii=False))
    _emit(lines, args.out, stdout)
    return EXIT_OK


def cmd_slr(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    tasks = read_slr_tasks(args.tasks)
    lines = []
    solved = 0
    for task in tasks:
        res = induce_rule(task, max_literals=args.max_literals, top_k=args.top_k)
        ranked = []
        for rule, score in res.ranked:
            text = render_rule(rule)
            if args.verifier_cmd:
                score = external_score(text, args.tasks, args.verifier_cmd)
            ranked.append({"rule": text, "complexity": rule.complexity, "score": score})
        best = ranked[0] if ranked else {"rule": None, "complexity": None, "score": 0.0}
        solved += best["score"] == 1.0
        lines.append(
            json.dumps(
                {
                    "task_id": task.task_id,
                    "rule": best["rule"],
                    "complexity": best["complexity"],
                    "score": best["score"],
                    "solved": best["score"] == 1.0,
                    "candidates": ranked,
                    "evaluated": res.evaluated,
                },
                ensure_ascii=False,
            )
        )
    _emit(lines, args.out, stdout)
    target = stdout if args.out not in (None, "-") else stderr
    if tasks:
        target.write(f"slr: {solved}/{len(tasks)} solved ({100.0 * solved / len(tasks):.1f}%)\n")
    return EXIT_OK


@dataclass(frozen=True)
class _HybridJob:
    strategies: tuple[str, ...]
    cfg: StrategyConfig
    fallback_spec: str
    fallback_seed: int
    mode: str
    attempts: int
    pricing: PricingConfig

    def __call__(self, task: Task) -> RunLedger:
        fb: FallbackGenerator = make_fallback(self.fallback_spec, self.fallback_seed)
        return hybrid_solve(
            task, fb, self.attempts, self.mode, self.strategies, self.cfg, self.pricing  # type: ignore[arg-type]
        )


def _ledger_record(led: RunLedger) -> ResultRecord:
    return ResultRecord(
        led.task_id,
        led.success,
        led.final_reward,
        led.final_program,
        len(led.final_program),
        led.solver_result.strategy_id if led.final_source == "solver" else led.final_source,
        led.input_tokens,
        led.output_tokens,
        led.cost,
        led.fallback_used,
        led.fallback_attempts,
        led.final_source,
        led.error,
    )


def cmd_hybrid(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    try:
        make_fallback(args.fallback)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    strategies = _strategies(args)
    tasks = read_tasks(args.tasks, wrap=args.wrap_boundaries)
    pricing = PricingConfig(args.input_price, args.output_price, args.construction_cost)
    job = _HybridJob(
        strategies, _config(args), args.fallback, args.fallback_seed, args.mode, args.attempts, pricing
    )
    ledgers = _map(job, tasks, args.workers)
    _emit((_ledger_record(l).to_json() for l in ledgers), args.out, stdout)
    target = stdout if args.out not in (None, "-") else stderr
    if tasks:
        report = _report(tasks, [l.final_program for l in ledgers])
        _print_report(report, "hybrid", args.json, target)
    tin = sum(l.input_tokens for l in ledgers)
    tout = sum(l.output_tokens for l in ledgers)
    summary = {
        "tasks": len(tasks),
        "fallback_used": sum(l.fallback_used for l in ledgers),
        "fallback_errors": sum(l.error is not None for l in ledgers),
        "input_tokens": tin,
        "output_tokens": tout,
        "cost": format_cost(compute_cost(ledgers, pricing)),
        "cost_with_construction": format_cost(compute_cost(ledgers, pricing, include_construction=True)),
    }
    target.write(json.dumps(summary) + "\n")
    return EXIT_OK


def cmd_space(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    stdout.write(f"{cascade_search_space(args.V, args.max_len)}\n")
    if args.verbose:
        stdout.write(f"single-op programs: {count_programs(args.V)}\n")
    return EXIT_OK


def cmd_slr_space(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    stdout.write(f"{count_rule_candidates(args.L)}\n")
    return EXIT_OK


def compress_sweep(
    tasks: Sequence[Task],
    ratios: Sequence[Fraction | float | str],
    strategies: Sequence[str],
    cfg: StrategyConfig,
    workers: int = 1,
) -> list[dict]:
    """One row per ratio, in the order given: accuracy and mean returned length."""
    job = _SolveJob(tuple(strategies), cfg)
    rows = []
    for ratio in ratios:
        budgeted = [t.with_budget(compression_budget(len(t.examples), ratio)) for t in tasks]
        results = _map(job, budgeted, workers)
        n = len(results) or 1
        rows.append(
            {
                "ratio": str(Fraction(str(ratio))),
                "accuracy": round(100.0 * sum(r.success for r in results) / n, 1),
                "mean_length": round(sum(r.complexity for r in results) / n, 4),
                "max_budget": max((t.max_programs for t in budgeted), default=0),
                "over_budget": sum(r.complexity > t.max_programs for r, t in zip(results, budgeted)),
            }
        )
    return rows


def cmd_compress(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    strategies = _strategies(args)
    tasks = read_tasks(args.tasks, wrap=args.wrap_boundaries)
    rows = compress_sweep(tasks, args.ratios, strategies, _config(args), args.workers)
    if args.json:
        stdout.write(json.dumps(rows, indent=2) + "\n")
        return EXIT_OK
    stdout.write(f"{'ratio':>6}  {'acc%':>6}  {'mean_len':>8}  {'max_budget':>10}\n")
    for r in rows:
        stdout.write(f"{r['ratio']:>6}  {r['accuracy']:>6.1f}  {r['mean_length']:>8.2f}  {r['max_budget']:>10}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cascadesynth", description="String-rewrite cascade synthesis and rule induction.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve a task file")
    s.add_argument("tasks")
    s.add_argument("-o", "--out", help="result file (default: stdout)")
    s.add_argument("--json", action="store_true", help="print the report as JSON")
    _add_config_flags(s)
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="generate synthetic tasks")
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--start", type=int, default=0, help="first task index")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--alphabet", default="abcde")
    g.add_argument("--cascade-len", type=_int_range, default=(2, 5))
    g.add_argument("--examples", type=int, default=5)
    g.add_argument("--string-len", type=_int_range, default=(3, 8))
    g.add_argument("--max-programs", type=int)
    g.add_argument("--wrap-boundaries", action="store_true")
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_gen)

    gs = sub.add_parser("gen-slr", help="generate SLR tasks with planted rules")
    gs.add_argument("--count", type=int, required=True)
    gs.add_argument("--seed", type=int, default=0)
    gs.add_argument("--complexity", type=_int_range, default=(1, 3))
    gs.add_argument("--trains", type=_positive_int, default=6)
    gs.add_argument("--max-cars", type=_positive_int, default=5)
    gs.add_argument("-o", "--out")
    gs.set_defaults(func=cmd_gen_slr)

    r = sub.add_parser("slr", help="induce rules for an SLR task file")
    r.add_argument("tasks")
    r.add_argument("--top-k", type=_positive_int, default=1)
    r.add_argument("--max-literals", type=_positive_int, default=4)
    r.add_argument("--verifier-cmd", help="external scorer: gets the rule on stdin, task path as argument")
    r.add_argument("-o", "--out")
    r.set_defaults(func=cmd_slr)

    h = sub.add_parser("hybrid", help="solver first, fallback generator on failures")
    h.add_argument("tasks")
    h.add_argument("--fallback", default="none", help="oracle | noisy:<p> | cmd:<path> | none")
    h.add_argument("--fallback-seed", type=int, default=0)
    h.add_argument("--mode", choices=("best_of_k", "direct_feedback"), default="direct_feedback")
    h.add_argument("--attempts", type=_positive_int, default=4)
    h.add_argument("--input-price", type=_decimal, default=Decimal("0.039"), help="per million tokens")
    h.add_argument("--output-price", type=_decimal, default=Decimal("0.190"), help="per million tokens")
    h.add_argument("--construction-cost", type=_decimal, default=Decimal("0"))
    h.add_argument("-o", "--out")
    h.add_argument("--json", action="store_true")
    _add_config_flags(h)
    h.set_defaults(func=cmd_hybrid)

    sp = sub.add_parser("space", help="cascade search-space size")
    sp.add_argument("V", type=_positive_int, help="alphabet size")
    sp.add_argument("max_len", type=_positive_int, help="maximum cascade length")
    sp.add_argument("-v", "--verbose", action="store_true")
    sp.set_defaults(func=cmd_space)

    ss = sub.add_parser("slr-space", help="number of SLR rule candidates")
    ss.add_argument("L", type=_positive_int, help="vocabulary size")
    ss.set_defaults(func=cmd_slr_space)

    c = sub.add_parser("compress", help="budget compression sweep")
    c.add_argument("tasks")
    c.add_argument("--ratios", type=_ratios, default=_ratios("1,2,3,5"))
    c.add_argument("--json", action="store_true")
    _add_config_flags(c)
    c.set_defaults(func=cmd_compress)
    return p


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, stdout, stderr)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (RecordError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except GenerationExhausted as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_EXHAUSTED


if __name__ == "__main__":
    sys.exit(main())
