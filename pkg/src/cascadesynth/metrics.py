"""Task reward, edit similarity, complexity gap and corpus reports."""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Hashable, Iterable, Sequence

from rapidfuzz.distance import Levenshtein

from .dsl import Task, apply_cascade

if TYPE_CHECKING:
    from .solvers import SolveResult

log = logging.getLogger(__name__)


def levenshtein(a: str, b: str) -> int:
    return Levenshtein.distance(a, b)


def string_similarity(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def predictions(cascade, task: Task) -> list[str]:
    return [apply_cascade(cascade, ex.input) for ex in task.examples]


def reward(cascade, task: Task) -> float:
    """Fraction of examples the cascade maps exactly onto their outputs."""
    hits = sum(apply_cascade(cascade, ex.input) == ex.output for ex in task.examples)
    return hits / len(task.examples)


def edit_similarity(cascade, task: Task) -> float:
    sims = [string_similarity(apply_cascade(cascade, ex.input), ex.output) for ex in task.examples]
    return sum(sims) / len(sims)


def delta_complexity(results: Iterable[tuple["SolveResult", Task]]) -> float | None:
    """Mean (predicted - ground truth) length over solved tasks, or None if none solved."""
    diffs = []
    skipped = 0
    for res, task in results:
        if not res.success:
            continue
        gt = task.meta.cascade_length if task.meta else None
        if gt is None:
            skipped += 1
            continue
        diffs.append(res.complexity - gt)
    if skipped:
        log.warning("delta_complexity: skipped %d solved task(s) without ground truth", skipped)
    return sum(diffs) / len(diffs) if diffs else None


@dataclass(frozen=True)
class TaskScore:
    reward: float
    success: bool
    edit_similarity: float
    predicted_complexity: int | None = None
    gt_complexity: int | None = None
    task_id: str = ""
    group: Hashable | None = None


def score_task(cascade, task: Task, group: Hashable | None = None) -> TaskScore:
    r = reward(cascade, task)
    gt = task.meta.cascade_length if task.meta else None
    return TaskScore(
        reward=r,
        success=r == 1.0,
        edit_similarity=edit_similarity(cascade, task),
        predicted_complexity=len(cascade),
        gt_complexity=gt,
        task_id=task.task_id,
        group=group,
    )


@dataclass
class CorpusReport:
    accuracy: float
    mean_reward: float
    edit_sim: float
    delta_complexity: float | None
    n_tasks: int
    breakdowns: dict[Any, "CorpusReport"] = field(default_factory=dict)
    delta_skipped: int = 0

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "accuracy": round(self.accuracy, 1),
            "mean_reward": round(self.mean_reward, 4),
            "edit_sim": round(self.edit_sim, 1),
            "delta_complexity": None if self.delta_complexity is None else round(self.delta_complexity, 4),
            "n_tasks": self.n_tasks,
        }
        if self.breakdowns:
            d["breakdowns"] = {str(k): v.to_dict() for k, v in self.breakdowns.items()}
        else:
            d["breakdowns"] = {}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_table(self, title: str = "") -> str:
        rows = [("all", self)] + [(str(k), v) for k, v in self.breakdowns.items()]
        header = ("group", "n", "acc%", "reward", "editsim", "delta")
        lines = [title] if title else []
        body = [
            (
                name,
                str(r.n_tasks),
                f"{r.accuracy:.1f}",
                f"{r.mean_reward:.4f}",
                f"{r.edit_sim:.1f}",
                "-" if r.delta_complexity is None else f"{r.delta_complexity:+.2f}",
            )
            for name, r in rows
        ]
        widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(header)]
        fmt = "  ".join(f"{{:<{w}}}" if i == 0 else f"{{:>{w}}}" for i, w in enumerate(widths))
        lines.append(fmt.format(*header))
        lines.extend(fmt.format(*b) for b in body)
        return "\n".join(lines)


def _summarize(scores: Sequence[TaskScore]) -> CorpusReport:
    n = len(scores)
    diffs = []
    skipped = 0
    for s in scores:
        if not s.success:
            continue
        if s.gt_complexity is None or s.predicted_complexity is None:
            skipped += 1
        else:
            diffs.append(s.predicted_complexity - s.gt_complexity)
    return CorpusReport(
        accuracy=100.0 * sum(s.success for s in scores) / n,
        mean_reward=sum(s.reward for s in scores) / n,
        edit_sim=100.0 * sum(s.edit_similarity for s in scores) / n,
        delta_complexity=sum(diffs) / len(diffs) if diffs else None,
        n_tasks=n,
        delta_skipped=skipped,
    )


def aggregate(
    scores: Sequence[TaskScore],
    group_key: Callable[[TaskScore], Hashable] | None = None,
) -> CorpusReport:
    """Corpus means plus per-group breakdowns, groups in ascending key order.

    Scores are sorted by ``task_id`` first so floating-point sums do not
    depend on input order.
    """
    if not scores:
        raise ValueError("aggregate needs at least one score")
    ordered = sorted(scores, key=lambda s: (s.task_id, s.reward, s.edit_similarity))
    report = _summarize(ordered)
    if group_key is not None:
        groups: dict[Hashable, list[TaskScore]] = defaultdict(list)
        for s in ordered:
            groups[group_key(s)].append(s)
        report.breakdowns = {k: _summarize(groups[k]) for k in sorted(groups, key=_sort_key)}
    return report


def _sort_key(k: Hashable) -> tuple:
    # None first, then numbers, then everything else by string form
    if k is None:
        return (0, 0, "")
    if isinstance(k, (int, float)):
        return (1, k, "")
    return (2, 0, str(k))
