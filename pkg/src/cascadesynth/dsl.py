"""String-rewrite DSL: ``replace(A, B)`` ops, cascades, tasks and program counts.

A cascade is a plain tuple of :class:`ReplaceOp`; it is applied left to right,
each op seeing the output of the previous one.  Op semantics are those of
:meth:`str.replace`: left-to-right, non-overlapping, and inserted text is never
rescanned within the same op.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

MAX_PATTERN_LEN = 3
MAX_REPLACEMENT_LEN = 3
BOUNDARY = "#"


@dataclass(frozen=True, order=True)
class ReplaceOp:
    pattern: str
    replacement: str

    def __post_init__(self) -> None:
        if not 1 <= len(self.pattern) <= MAX_PATTERN_LEN:
            raise ValueError(f"pattern length must be in [1, {MAX_PATTERN_LEN}]: {self.pattern!r}")
        if len(self.replacement) > MAX_REPLACEMENT_LEN:
            raise ValueError(
                f"replacement length must be in [0, {MAX_REPLACEMENT_LEN}]: {self.replacement!r}"
            )
        if self.pattern == self.replacement:
            raise ValueError(f"identity op rejected: {self.pattern!r}")

    def __call__(self, s: str) -> str:
        return s.replace(self.pattern, self.replacement)

    def __repr__(self) -> str:
        return f"replace({self.pattern!r}, {self.replacement!r})"


Cascade = tuple[ReplaceOp, ...]


def apply_op(op: ReplaceOp, s: str) -> str:
    return s.replace(op.pattern, op.replacement)


def apply_cascade(cascade: Iterable[ReplaceOp], s: str) -> str:
    for op in cascade:
        s = s.replace(op.pattern, op.replacement)
    return s


def trace_cascade(cascade: Sequence[ReplaceOp], s: str) -> list[str]:
    """Return ``[s, op1(s), op2(op1(s)), ...]``."""
    states = [s]
    for op in cascade:
        s = s.replace(op.pattern, op.replacement)
        states.append(s)
    return states


def complexity(cascade: Sequence[ReplaceOp]) -> int:
    return len(cascade)


def cascade_to_json(cascade: Sequence[ReplaceOp]) -> list[list[str]]:
    return [[op.pattern, op.replacement] for op in cascade]


def cascade_from_json(data: Any) -> Cascade:
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, list):
        raise ValueError("cascade must be a JSON array of [pattern, replacement] pairs")
    ops = []
    for item in data:
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(x, str) for x in item)):
            raise ValueError(f"malformed op {item!r}")
        ops.append(ReplaceOp(item[0], item[1]))
    return tuple(ops)


def count_programs(alphabet_size: int) -> int:
    """Number of ``replace(A, B)`` programs with |A| in [1,3] and |B| in [0,3]."""
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be >= 1")
    v = alphabet_size
    return (v + v**2 + v**3) * (1 + v + v**2 + v**3)


def cascade_search_space(alphabet_size: int, max_len: int) -> int:
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    c = count_programs(alphabet_size)
    return sum(c**k for k in range(1, max_len + 1))


@dataclass(frozen=True)
class Example:
    input: str
    output: str


@dataclass(frozen=True)
class TaskMeta:
    ground_truth: Cascade | None = None
    cascade_length: int | None = None
    bfcc: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Task:
    task_id: str
    examples: tuple[Example, ...]
    max_programs: int
    alphabet: tuple[str, ...] = ()
    meta: TaskMeta | None = None

    def __post_init__(self) -> None:
        if not self.examples:
            raise ValueError(f"task {self.task_id!r} has no examples")
        if self.max_programs < 1:
            raise ValueError(f"task {self.task_id!r}: max_programs must be positive")
        used = alphabet_of(s for ex in self.examples for s in (ex.input, ex.output))
        if not self.alphabet:
            object.__setattr__(self, "alphabet", used)
        else:
            missing = set(used) - set(self.alphabet)
            if missing:
                raise ValueError(f"task {self.task_id!r}: alphabet lacks {sorted(missing)}")

    @property
    def inputs(self) -> tuple[str, ...]:
        return tuple(ex.input for ex in self.examples)

    @property
    def outputs(self) -> tuple[str, ...]:
        return tuple(ex.output for ex in self.examples)

    @property
    def ground_truth(self) -> Cascade | None:
        return self.meta.ground_truth if self.meta else None

    def with_budget(self, max_programs: int) -> Task:
        return Task(self.task_id, self.examples, max_programs, self.alphabet, self.meta)

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[str, str]],
        max_programs: int = 5,
        task_id: str = "task",
        ground_truth: Sequence[ReplaceOp] | None = None,
    ) -> Task:
        meta = None
        if ground_truth is not None:
            gt = tuple(ground_truth)
            meta = TaskMeta(ground_truth=gt, cascade_length=len(gt))
        return cls(task_id, tuple(Example(a, b) for a, b in pairs), max_programs, meta=meta)


def alphabet_of(strings: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted({ch for s in strings for ch in s}))


def wrap_boundaries(s: str) -> str:
    return f"{BOUNDARY}{s}{BOUNDARY}"
