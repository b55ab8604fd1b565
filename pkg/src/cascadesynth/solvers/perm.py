"""Permutation-based strategies: forced-op ordering and multi-start reorder."""

from __future__ import annotations

import itertools
import random
from functools import reduce

from ..diff import exact_fixes, pair_candidates
from ..dsl import MAX_PATTERN_LEN, MAX_REPLACEMENT_LEN, ReplaceOp, Task
from .core import Search, SolveResult, StrategyConfig, Strings, is_degenerate, orderings
from .greedy import _progress, best_single, greedy_construct


def forced_ops(task: Task) -> list[ReplaceOp]:
    """Uncontexted ops proposed by every mismatched example, in (pattern, replacement) order."""
    proposals = [
        set(pair_candidates(ex.input, ex.output, 0))
        for ex in task.examples
        if ex.input != ex.output
    ]
    if not proposals:
        return []
    return sorted(reduce(set.intersection, proposals))


def _best_ordering(search: Search, ops, cap: int, rng, safe: bool):
    best = None
    for perm in orderings(ops, cap, rng):
        nxt = search.apply_all(search.inputs, perm)
        if safe and not _replay_safe(search, perm):
            continue
        k = search.key(nxt, len(perm))
        if best is None or k > best[0]:
            best = (k, list(perm), nxt)
    return best


def _replay_safe(search: Search, program) -> bool:
    cur = search.inputs
    for op in program:
        if not search.is_safe_op(cur, op):
            return False
        cur = search.apply(cur, op)
    return True


def _two_op_sequences(search: Search, cur: Strings, safe: bool):
    """For each residual pair: any op it proposes, then an exact fix of that pair."""
    best = None
    for i in search.mismatched(cur):
        for op1 in search.pair_ops(cur[i], search.targets[i]):
            if safe and not search.is_safe_op(cur, op1):
                continue
            mid = search.apply(cur, op1)
            finish = exact_fixes(mid[i], search.targets[i])
            if safe:
                finish = [op for op in finish if search.is_safe_op(mid, op)]
            step = best_single(search, mid, finish)
            if step is not None and (best is None or step[0] > best[0]):
                best = (step[0], (op1, step[1]), step[2])
    return best


def two_op_completion(search: Search, cur: Strings, safe: bool, limit: int):
    """Exhaustive search for two ops that finish every example, when the op space is small.

    The first op ranges over every pattern occurring in a current string and
    every replacement over the task alphabet; the second is solved exactly.
    Returns None without searching when that space exceeds ``limit``.
    """
    alphabet = search.task.alphabet
    n_repl = sum(len(alphabet) ** k for k in range(MAX_REPLACEMENT_LEN + 1))
    patterns = sorted({
        s[a:b]
        for s in cur
        for a in range(len(s))
        for b in range(a + 1, min(a + MAX_PATTERN_LEN, len(s)) + 1)
    })
    if len(patterns) * n_repl > limit:
        return None
    for p in patterns:
        for n in range(MAX_REPLACEMENT_LEN + 1):
            for chars in itertools.product(alphabet, repeat=n):
                r = "".join(chars)
                if r == p:
                    continue
                op1 = ReplaceOp(p, r)
                if safe and not search.is_safe_op(cur, op1):
                    continue
                mid = search.apply(cur, op1)
                if search.perfect(mid):
                    return (op1,), mid
                op2 = search.finisher(mid, safe)
                if op2 is not None:
                    return (op1, op2), search.targets
    return None


def solve_unique_op_permutations(
    task: Task, cfg: StrategyConfig = StrategyConfig()
) -> SolveResult:
    """Order the forced ops by permutation search, then extend greedily.

    When the forced set has more orderings than ``cfg.perm_cap`` or exceeds the
    budget, the sorted order (truncated to the budget) is used as is.
    """
    sid = "unique_perm"
    search = Search(task, cfg)
    if is_degenerate(task):
        return search.result((), sid)
    safe = cfg.safety_mode == "strict"
    forced = forced_ops(task)
    cur, program = search.inputs, []
    if forced:
        if len(forced) <= search.budget:
            best = _best_ordering(search, forced, cfg.perm_cap, None, safe)
        else:
            best = None
        if best is None:
            head = forced[: search.budget]
            if not safe or _replay_safe(search, head):
                nxt = search.apply_all(search.inputs, head)
                best = (search.key(nxt, len(head)), head, nxt)
        if best is not None and best[0][:2] >= _progress(search, cur):
            program, cur = best[1], best[2]
    while len(program) < search.budget and not search.perfect(cur):
        here = _progress(search, cur)
        room = search.budget - len(program)
        if room >= 2:
            done = two_op_completion(search, cur, safe, cfg.completion_limit)
            if done is not None:
                program.extend(done[0])
                cur = done[1]
                break
        step = best_single(search, cur, search.candidates(cur, safe))
        if step is not None and step[0] > here:
            cur = step[2]
            program.append(step[1])
            continue
        if room < 2:
            break
        pair = _two_op_sequences(search, cur, safe)
        if pair is None or pair[0] <= here:
            break
        cur = pair[2]
        program.extend(pair[1])
    return search.result(program, sid)


def solve_multistart_reorder(
    task: Task, cfg: StrategyConfig = StrategyConfig()
) -> SolveResult:
    """Several greedy constructions with shuffled tie-breaking, each followed by a reorder search."""
    sid = "multistart_reorder"
    search = Search(task, cfg)
    if is_degenerate(task):
        return search.result((), sid)
    safe = cfg.safety_mode == "strict"
    best = None
    for restart in range(cfg.restarts):
        rng = random.Random(f"{cfg.seed}:{restart}")
        if restart == 0:
            order = list
        else:
            def order(ops, rng=rng):
                ops = list(ops)
                rng.shuffle(ops)
                return ops
        program, cur = greedy_construct(search, order, safe)
        cand = (search.key(cur, len(program)), program, cur)
        reordered = _best_ordering(search, program, cfg.perm_cap, rng, safe)
        if reordered is not None and reordered[0] > cand[0]:
            cand = reordered
        if best is None or cand[0] > best[0]:
            best = cand
        if search.perfect(best[2]):
            break
    return search.result(best[1], sid)
