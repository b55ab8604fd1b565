"""Shared search machinery for the PBE strategies.

Every strategy scores a search state (the per-example intermediate strings)
with the same lexicographic key: solved count, then negative total residual
edit distance, then negative cascade length.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from ..diff import exact_fixes, extract_candidates, pair_candidates
from ..dsl import Cascade, ReplaceOp, Task, apply_cascade
from ..metrics import levenshtein, reward

SafetyMode = Literal["strict", "two_phase", "off"]
Strings = tuple[str, ...]
Key = tuple[int, int, int]


@dataclass(frozen=True)
class StrategyConfig:
    beam_width: int = 16
    max_candidates_per_step: int = 64
    lookahead: int = 2
    restarts: int = 8
    seed: int = 42
    safety_mode: SafetyMode = "two_phase"
    perm_cap: int = 120
    max_context: int = 2
    completion_limit: int = 4000

    def __post_init__(self) -> None:
        for name in ("beam_width", "max_candidates_per_step", "restarts", "perm_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.lookahead not in (0, 1, 2):
            raise ValueError("lookahead must be 0, 1 or 2")
        if self.safety_mode not in ("strict", "two_phase", "off"):
            raise ValueError(f"unknown safety_mode {self.safety_mode!r}")
        if self.max_context < 0:
            raise ValueError("max_context must be >= 0")


@dataclass(frozen=True)
class SolveResult:
    success: bool
    program: Cascade
    reward: float
    complexity: int
    strategy_id: str
    candidates_evaluated: int = 0


class Search:
    """Per-task search context: targets, candidate generation, scoring, counters."""

    def __init__(self, task: Task, cfg: StrategyConfig):
        self.task = task
        self.cfg = cfg
        self.inputs: Strings = task.inputs
        self.targets: Strings = task.outputs
        self.budget = task.max_programs
        self.evaluated = 0

    def apply(self, currents: Strings, op: ReplaceOp) -> Strings:
        self.evaluated += 1
        p, r = op.pattern, op.replacement
        return tuple(s.replace(p, r) for s in currents)

    def apply_all(self, currents: Strings, ops: Iterable[ReplaceOp]) -> Strings:
        self.evaluated += 1
        return tuple(apply_cascade(ops, s) for s in currents)

    def key(self, currents: Strings, length: int = 0) -> Key:
        solved = 0
        dist = 0
        for s, t in zip(currents, self.targets):
            if s == t:
                solved += 1
            else:
                dist += levenshtein(s, t)
        return (solved, -dist, -length)

    def perfect(self, currents: Strings) -> bool:
        return currents == self.targets

    def mismatched(self, currents: Strings) -> list[int]:
        return [i for i, (s, t) in enumerate(zip(currents, self.targets)) if s != t]

    def is_safe_op(self, currents: Strings, op: ReplaceOp) -> bool:
        return not any(s == t and op.pattern in s for s, t in zip(currents, self.targets))

    def candidates(self, currents: Strings, safe: bool = False) -> list[ReplaceOp]:
        """Candidate ops for the next step, best families first, capped.

        Families, in order: exact single-op fixes of a mismatched example,
        alignment candidates, backward candidates (ops that lead to the
        pre-image of a likely final op) and single-character edits.
        """
        bad = self.mismatched(currents)
        fixes = _ranked(exact_fixes(currents[i], self.targets[i]) for i in bad)
        cset = extract_candidates(
            ((currents[i], self.targets[i]) for i in bad), self.cfg.max_context
        )
        forward = list(dict.fromkeys(fixes + list(cset.ops)))
        backward = self._backward(currents, bad, forward)
        chars = _char_edits(currents, bad, self.task.alphabet)
        ops = list(dict.fromkeys(forward + backward + chars))
        if safe:
            ops = [op for op in ops if self.is_safe_op(currents, op)]
        return ops[: self.cfg.max_candidates_per_step]

    def _backward(self, currents: Strings, bad: list[int], last_ops: list[ReplaceOp]) -> list[ReplaceOp]:
        proposals = []
        for op2 in last_ops:
            if not op2.replacement:
                continue
            for i in bad:
                pre = self.targets[i].replace(op2.replacement, op2.pattern)
                if pre != self.targets[i]:
                    proposals.append(exact_fixes(currents[i], pre))
        return _ranked(proposals)

    def finisher(self, currents: Strings, safe: bool = False) -> ReplaceOp | None:
        """A single op that maps every current string onto its target, if any."""
        bad = self.mismatched(currents)
        if not bad:
            return None
        i = bad[0]
        for op in exact_fixes(currents[i], self.targets[i]):
            if safe and not self.is_safe_op(currents, op):
                continue
            if self.apply(currents, op) == self.targets:
                return op
        return None

    def pair_ops(self, current: str, target: str) -> list[ReplaceOp]:
        ops = exact_fixes(current, target) + list(
            pair_candidates(current, target, self.cfg.max_context)
        )
        return [op for op in dict.fromkeys(ops) if op.pattern in current]

    def result(self, program: Sequence[ReplaceOp], strategy_id: str) -> SolveResult:
        program = tuple(program)
        r = reward(program, self.task)
        return SolveResult(r == 1.0, program, r, len(program), strategy_id, self.evaluated)


def _ranked(groups: Iterable[Iterable[ReplaceOp]]) -> list[ReplaceOp]:
    counts: dict[ReplaceOp, int] = {}
    for group in groups:
        for op in group:
            counts[op] = counts.get(op, 0) + 1
    return sorted(counts, key=lambda op: (-counts[op], op.pattern, op.replacement))


def _char_edits(currents: Strings, bad: list[int], alphabet: Sequence[str]) -> list[ReplaceOp]:
    present = sorted({ch for i in bad for ch in currents[i]})
    return [ReplaceOp(c, r) for c in present for r in ("", *alphabet) if r != c]


def is_degenerate(task: Task) -> bool:
    return all(ex.input == ex.output for ex in task.examples)


def is_safe_cascade(cascade: Sequence[ReplaceOp], task: Task) -> bool:
    """True if no op ever changes an example that already equals its target."""
    for ex in task.examples:
        s = ex.input
        for op in cascade:
            nxt = s.replace(op.pattern, op.replacement)
            if s == ex.output and nxt != s:
                return False
            s = nxt
    return True


def orderings(
    ops: Sequence[ReplaceOp], cap: int, rng: random.Random | None = None
) -> list[tuple[ReplaceOp, ...]]:
    """All permutations when there are at most ``cap``; otherwise identity plus sampled shuffles."""
    ops = tuple(ops)
    if math.factorial(len(ops)) <= cap:
        return list(dict.fromkeys(itertools.permutations(ops)))
    if rng is None:
        return [ops]
    out = {ops: None}
    for _ in range(cap * 4):
        if len(out) >= cap:
            break
        perm = list(ops)
        rng.shuffle(perm)
        out.setdefault(tuple(perm), None)
    return list(out)
