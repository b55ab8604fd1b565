"""JSONL task and result records.

Serialization is canonical (fixed key order and separators, UTF-8 kept
as is), so reading a file and writing it back reproduces it byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Any, Iterable, Iterator

from .dsl import Example, Task, TaskMeta, alphabet_of, cascade_from_json, cascade_to_json, wrap_boundaries
from .slr import SlrTask


class RecordError(ValueError):
    """A malformed line in a JSONL file; ``line`` is 1-based."""

    def __init__(self, line: int, message: str, task_id: str | None = None):
        where = f"line {line}" + (f" ({task_id})" if task_id else "")
        super().__init__(f"{where}: {message}")
        self.line = line
        self.task_id = task_id


def _dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


def task_to_record(task: Task) -> dict[str, Any]:
    rec: dict[str, Any] = {
        "task_id": task.task_id,
        "examples": [[ex.input, ex.output] for ex in task.examples],
        "max_programs": task.max_programs,
    }
    # the alphabet is only stored when it carries more than the examples show
    if task.alphabet != alphabet_of(s for ex in task.examples for s in (ex.input, ex.output)):
        rec["alphabet"] = "".join(task.alphabet)
    if task.meta is not None:
        meta: dict[str, Any] = {}
        if task.meta.ground_truth is not None:
            meta["ground_truth"] = cascade_to_json(task.meta.ground_truth)
        if task.meta.cascade_length is not None:
            meta["cascade_length"] = task.meta.cascade_length
        if task.meta.bfcc is not None:
            meta["bfcc"] = list(task.meta.bfcc)
        rec["meta"] = meta
    return rec


def task_from_record(rec: Any, wrap: bool = False) -> Task:
    if not isinstance(rec, dict):
        raise ValueError("task record must be a JSON object")
    try:
        task_id = rec["task_id"]
        raw = rec["examples"]
        budget = rec["max_programs"]
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(task_id, str):
        raise ValueError("task_id must be a string")
    if not isinstance(budget, int) or isinstance(budget, bool):
        raise ValueError("max_programs must be an integer")
    if not isinstance(raw, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(s, str) for s in p) for p in raw
    ):
        raise ValueError("examples must be an array of [input, output] string pairs")
    pairs = [(a, b) for a, b in raw]
    if wrap:
        pairs = [(wrap_boundaries(a), wrap_boundaries(b)) for a, b in pairs]
    alphabet = tuple(rec.get("alphabet", ""))
    if wrap and alphabet and "#" not in alphabet:
        alphabet += ("#",)
    meta = None
    if rec.get("meta") is not None:
        m = rec["meta"]
        if not isinstance(m, dict):
            raise ValueError("meta must be an object")
        gt = cascade_from_json(m["ground_truth"]) if m.get("ground_truth") is not None else None
        bfcc = tuple(m["bfcc"]) if m.get("bfcc") is not None else None
        meta = TaskMeta(ground_truth=gt, cascade_length=m.get("cascade_length"), bfcc=bfcc)
    return Task(task_id, tuple(Example(a, b) for a, b in pairs), budget, alphabet, meta)


def dump_task(task: Task) -> str:
    return _dumps(task_to_record(task))


def _read_lines(path: str | Path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if line.strip():
                yield n, line


def read_tasks(path: str | Path, wrap: bool = False) -> list[Task]:
    """Parse a task JSONL file; raises :class:`RecordError` naming the bad line."""
    tasks = []
    for n, line in _read_lines(path):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(n, f"invalid JSON: {exc.msg}") from None
        try:
            tasks.append(task_from_record(rec, wrap))
        except (ValueError, TypeError) as exc:
            tid = rec.get("task_id") if isinstance(rec, dict) else None
            raise RecordError(n, str(exc), tid) from None
    return tasks


def write_lines(path: str | Path, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def write_tasks(path: str | Path, tasks: Iterable[Task]) -> None:
    write_lines(path, (dump_task(t) for t in tasks))


def read_slr_tasks(path: str | Path) -> list[SlrTask]:
    tasks = []
    for n, line in _read_lines(path):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(n, f"invalid JSON: {exc.msg}") from None
        try:
            task = SlrTask.from_json(rec)
            task.trains()  # surface fact errors at load time
        except (ValueError, KeyError, TypeError) as exc:
            tid = rec.get("task_id") if isinstance(rec, dict) else None
            raise RecordError(n, str(exc), tid) from None
        tasks.append(task)
    return tasks


def format_cost(cost: Decimal) -> str:
    """Plain (non-exponent) decimal text with trailing zeros dropped."""
    return format(cost.normalize(), "f")


@dataclass(frozen=True)
class ResultRecord:
    task_id: str
    success: bool
    reward: float
    program: tuple
    complexity: int
    strategy_id: str
    input_tokens: int = 0
    output_tokens: int = 0
    cost: Decimal = Decimal("0")
    # present only in hybrid ledgers
    fallback_used: bool | None = None
    fallback_attempts: int | None = None
    source: str | None = None
    error: str | None = None

    def __post_init__(self) -> None:
        if self.success != (self.reward == 1.0):
            raise ValueError(f"{self.task_id}: success must equal (reward == 1.0)")

    def to_json(self) -> str:
        head = {
            "task_id": self.task_id,
            "success": self.success,
            "reward": self.reward,
            "program": cascade_to_json(self.program),
            "complexity": self.complexity,
            "strategy_id": self.strategy_id,
            "tokens": {"input": self.input_tokens, "output": self.output_tokens},
        }
        text = _dumps(head)[:-1] + f', "cost": {format_cost(self.cost)}'
        tail = {
            k: getattr(self, k)
            for k in ("fallback_used", "fallback_attempts", "source", "error")
            if getattr(self, k) is not None
        }
        if tail:
            text += ", " + _dumps(tail)[1:-1]
        return text + "}"

    @classmethod
    def from_json(cls, line: str) -> ResultRecord:
        d = json.loads(line, parse_float=lambda s: s)
        cost_text = d["cost"] if isinstance(d["cost"], str) else str(d["cost"])
        return cls(
            task_id=d["task_id"],
            success=d["success"],
            reward=float(d["reward"]),
            program=cascade_from_json(d["program"]),
            complexity=d["complexity"],
            strategy_id=d["strategy_id"],
            input_tokens=d["tokens"]["input"],
            output_tokens=d["tokens"]["output"],
            cost=Decimal(cost_text),
            fallback_used=d.get("fallback_used"),
            fallback_attempts=d.get("fallback_attempts"),
            source=d.get("source"),
            error=d.get("error"),
        )


def read_results(path: str | Path) -> list[ResultRecord]:
    out = []
    for n, line in _read_lines(path):
        try:
            out.append(ResultRecord.from_json(line))
        except (ValueError, KeyError, TypeError) as exc:
            raise RecordError(n, str(exc)) from None
    return out
