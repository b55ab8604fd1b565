"""Greedy strategies: safety-first with lookahead, and greedy with residual repair."""

from __future__ import annotations

from typing import Sequence

from ..dsl import ReplaceOp, Task
from .core import Search, SolveResult, StrategyConfig, Strings, is_degenerate


def _progress(search: Search, currents: Strings) -> tuple[int, int]:
    return search.key(currents)[:2]


def best_single(
    search: Search, currents: Strings, ops: Sequence[ReplaceOp]
) -> tuple[tuple[int, int], ReplaceOp, Strings] | None:
    """Best op by (solved, -residual); ties keep the earliest op."""
    best = None
    for op in ops:
        nxt = search.apply(currents, op)
        if nxt == currents:
            continue
        k = _progress(search, nxt)
        if best is None or k > best[0]:
            best = (k, op, nxt)
    return best


def best_pair(
    search: Search, currents: Strings, safe: bool
) -> tuple[tuple[int, int], tuple[ReplaceOp, ReplaceOp], Strings] | None:
    """Ordered two-op lookahead; the second op is drawn from the intermediate state."""
    best = None
    for op1 in search.candidates(currents, safe):
        mid = search.apply(currents, op1)
        if mid == currents:
            continue
        for op2 in search.candidates(mid, safe):
            nxt = search.apply(mid, op2)
            if nxt == mid:
                continue
            k = _progress(search, nxt)
            if best is None or k > best[0]:
                best = (k, (op1, op2), nxt)
    return best


def solve_safety_greedy_lookahead(
    task: Task, cfg: StrategyConfig = StrategyConfig()
) -> SolveResult:
    """Greedy that never touches an already-correct example, with 2-step lookahead on stalls."""
    sid = "safety_greedy"
    search = Search(task, cfg)
    if is_degenerate(task):
        return search.result((), sid)
    safe = cfg.safety_mode != "off"
    cur, program = search.inputs, []
    while len(program) < search.budget and not search.perfect(cur):
        here = _progress(search, cur)
        step = best_single(search, cur, search.candidates(cur, safe))
        if step is not None and step[0] > here:
            cur = step[2]
            program.append(step[1])
            continue
        if cfg.lookahead < 2 or len(program) + 2 > search.budget:
            break
        pair = best_pair(search, cur, safe)
        if pair is None or pair[0] <= here:
            break
        cur = pair[2]
        program.extend(pair[1])
    return search.result(program, sid)


def _residual_step(search: Search, cur: Strings, room: int, safe: bool):
    """Best improving single op or two-op chain aimed at one mismatched pair at a time."""
    here = _progress(search, cur)
    best = None
    for i in search.mismatched(cur):
        ops = search.pair_ops(cur[i], search.targets[i])
        if safe:
            ops = [op for op in ops if search.is_safe_op(cur, op)]
        step = best_single(search, cur, ops)
        if step is not None and step[0] > here and (best is None or step[0] > best[0]):
            best = (step[0], (step[1],), step[2])
        if room < 2:
            continue
        # split chains: an op for this pair followed by whatever finishes it
        for op1 in ops:
            mid = search.apply(cur, op1)
            if mid == cur:
                continue
            follow = search.pair_ops(mid[i], search.targets[i])
            if safe:
                follow = [op for op in follow if search.is_safe_op(mid, op)]
            step2 = best_single(search, mid, follow)
            if step2 is not None and step2[0] > here and (best is None or step2[0] > best[0]):
                best = (step2[0], (op1, step2[1]), step2[2])
    return best


def solve_greedy_residual(task: Task, cfg: StrategyConfig = StrategyConfig()) -> SolveResult:
    """Greedy on fixes minus regressions, then per-pair residual repair passes."""
    sid = "greedy_residual"
    search = Search(task, cfg)
    if is_degenerate(task):
        return search.result((), sid)
    safe = cfg.safety_mode == "strict"
    cur, program = search.inputs, []
    # greedy pass over the pooled candidates
    while len(program) < search.budget and not search.perfect(cur):
        step = best_single(search, cur, search.candidates(cur, safe))
        if step is None or step[0] <= _progress(search, cur):
            break
        cur = step[2]
        program.append(step[1])
    # residual passes
    while len(program) < search.budget and not search.perfect(cur):
        step = _residual_step(search, cur, search.budget - len(program), safe)
        if step is None:
            break
        cur = step[2]
        program.extend(step[1])
    return search.result(program, sid)


def greedy_construct(
    search: Search, order_key, safe: bool
) -> tuple[list[ReplaceOp], Strings]:
    """Plain improving-step greedy; ``order_key`` reorders candidates for tie-breaking."""
    cur, program = search.inputs, []
    while len(program) < search.budget and not search.perfect(cur):
        ops = order_key(search.candidates(cur, safe))
        step = best_single(search, cur, ops)
        if step is None or step[0] <= _progress(search, cur):
            break
        cur = step[2]
        program.append(step[1])
    return program, cur

