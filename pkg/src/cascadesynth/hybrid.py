"""Solver-first inference with a pluggable fallback generator, plus token/cost accounting.

The symbolic ensemble runs first.  Only when it misses reward 1.0 is a
fallback generator consulted, either as K independent draws (best-of-K) or as
a sequential loop that sees which examples still fail (direct feedback).
Solver-solved tasks therefore cost zero tokens.
"""

from __future__ import annotations

import json
import logging
import math
import random
import subprocess
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Literal, Protocol, Sequence

from .dsl import Cascade, ReplaceOp, Task, cascade_from_json, cascade_to_json
from .metrics import predictions, reward
from .solvers import ALL, SolveResult, StrategyConfig, solve_ensemble

log = logging.getLogger(__name__)

Mode = Literal["best_of_k", "direct_feedback"]
MILLION = Decimal(1_000_000)


@dataclass(frozen=True)
class Usage:
    input_tokens: int = 0
    output_tokens: int = 0

    def __post_init__(self) -> None:
        if self.input_tokens < 0 or self.output_tokens < 0:
            raise ValueError("token counts must be nonnegative")

    def __add__(self, other: Usage) -> Usage:
        return Usage(self.input_tokens + other.input_tokens, self.output_tokens + other.output_tokens)


@dataclass(frozen=True)
class Attempt:
    cascade: Cascade | None
    usage: Usage = Usage()


@dataclass(frozen=True)
class Feedback:
    failing: tuple[int, ...]
    best: Cascade

    def to_dict(self) -> dict:
        return {"failing_examples": list(self.failing), "best": cascade_to_json(self.best)}


class FallbackError(RuntimeError):
    pass


class FallbackGenerator(Protocol):
    name: str

    def propose(self, task: Task, n: int, feedback: Feedback | None) -> list[Attempt]:
        """Return up to ``n`` attempts; may raise :class:`FallbackError`."""
        ...


def _mock_usage(task: Task, cascade: Sequence[ReplaceOp]) -> Usage:
    # rough 4-characters-per-token estimate of a prompt and a reply
    prompt = sum(len(ex.input) + len(ex.output) + 8 for ex in task.examples) + 200
    reply = len(json.dumps(cascade_to_json(cascade))) + 40
    return Usage(math.ceil(prompt / 4), math.ceil(reply / 4))


class NullFallback:
    name = "none"

    def propose(self, task: Task, n: int, feedback: Feedback | None) -> list[Attempt]:
        return []


class OracleFallback:
    """Returns the task's ground-truth cascade on every attempt."""

    name = "oracle"

    def propose(self, task: Task, n: int, feedback: Feedback | None) -> list[Attempt]:
        gt = task.ground_truth
        if gt is None:
            raise FallbackError(f"task {task.task_id} has no ground truth")
        return [Attempt(gt, _mock_usage(task, gt)) for _ in range(n)]


class NoisyOracleFallback:
    """Ground truth where each op's replacement is resampled with probability ``p``.

    The corrupted replacement has the same length; empty replacements cannot
    be corrupted and are kept.
    """

    def __init__(self, p: float, seed: int = 0):
        if not 0.0 <= p <= 1.0:
            raise ValueError("corruption probability must be in [0, 1]")
        self.p = p
        self.seed = seed
        self.name = f"noisy:{p}"
        self._calls: dict[str, int] = {}

    def _corrupt(self, op: ReplaceOp, rng: random.Random, alphabet: Sequence[str]) -> ReplaceOp:
        if not op.replacement or rng.random() >= self.p:
            return op
        for _ in range(32):
            r = "".join(rng.choice(alphabet) for _ in op.replacement)
            if r != op.replacement and r != op.pattern:
                return ReplaceOp(op.pattern, r)
        return op

    def propose(self, task: Task, n: int, feedback: Feedback | None) -> list[Attempt]:
        gt = task.ground_truth
        if gt is None:
            raise FallbackError(f"task {task.task_id} has no ground truth")
        out = []
        for _ in range(n):
            k = self._calls.get(task.task_id, 0)
            self._calls[task.task_id] = k + 1
            rng = random.Random(f"{self.seed}:{task.task_id}:{k}")
            cand = tuple(self._corrupt(op, rng, task.alphabet) for op in gt)
            out.append(Attempt(cand, _mock_usage(task, cand)))
        return out


class CommandFallback:
    """Candidates from an external program.

    The task record (plus ``attempts`` and ``feedback`` keys) goes to stdin as
    one JSON object; stdout holds one cascade JSON array per line followed by
    a usage line ``{"input_tokens": N, "output_tokens": M}``.
    """

    def __init__(self, command: Sequence[str] | str, timeout: float = 120.0):
        self.command = command.split() if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.name = f"cmd:{' '.join(self.command)}"

    def propose(self, task: Task, n: int, feedback: Feedback | None) -> list[Attempt]:
        from .io import task_to_record

        payload = task_to_record(task)
        payload["attempts"] = n
        payload["feedback"] = feedback.to_dict() if feedback else None
        try:
            proc = subprocess.run(
                self.command,
                input=json.dumps(payload, ensure_ascii=False),
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise FallbackError(f"fallback command failed: {exc}") from exc
        if proc.returncode != 0:
            raise FallbackError(f"fallback command exited {proc.returncode}: {proc.stderr.strip()[:200]}")
        lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
        usage = Usage()
        if lines:
            try:
                last = json.loads(lines[-1])
            except json.JSONDecodeError as exc:
                raise FallbackError(f"bad fallback output: {exc}") from exc
            if isinstance(last, dict):
                usage = Usage(int(last.get("input_tokens", 0)), int(last.get("output_tokens", 0)))
                lines = lines[:-1]
        attempts = []
        for ln in lines[:n]:
            try:
                cascade = cascade_from_json(ln)
            except ValueError:
                cascade = None
            attempts.append(Attempt(cascade))
        if attempts:
            attempts[0] = Attempt(attempts[0].cascade, usage)
        elif usage != Usage():
            attempts.append(Attempt(None, usage))
        return attempts


def make_fallback(spec: str, seed: int = 0) -> FallbackGenerator:
    """``oracle``, ``noisy:<p>``, ``cmd:<path>`` or ``none``."""
    if spec == "none":
        return NullFallback()
    if spec == "oracle":
        return OracleFallback()
    if spec.startswith("noisy:"):
        return NoisyOracleFallback(float(spec.split(":", 1)[1]), seed)
    if spec.startswith("cmd:"):
        return CommandFallback(spec.split(":", 1)[1])
    raise ValueError(f"unknown fallback spec {spec!r}")


@dataclass(frozen=True)
class PricingConfig:
    input_price: Decimal = Decimal("0.039")
    output_price: Decimal = Decimal("0.190")
    construction_cost: Decimal = Decimal("0")

    def __post_init__(self) -> None:
        for name in ("input_price", "output_price", "construction_cost"):
            value = Decimal(str(getattr(self, name)))
            if value < 0:
                raise ValueError(f"{name} must be nonnegative")
            object.__setattr__(self, name, value)


@dataclass
class RunLedger:
    task_id: str
    solver_result: SolveResult
    fallback_used: bool = False
    fallback_attempts: int = 0
    final_reward: float = 0.0
    final_program: Cascade = ()
    final_source: str = "solver"
    input_tokens: int = 0
    output_tokens: int = 0
    cost: Decimal = Decimal("0")
    attempt_usage: list[Usage] = field(default_factory=list)
    error: str | None = None

    @property
    def success(self) -> bool:
        return self.final_reward == 1.0


def compute_cost(
    ledgers: RunLedger | Iterable[RunLedger],
    pricing: PricingConfig = PricingConfig(),
    include_construction: bool = False,
) -> Decimal:
    """Token cost at per-million prices; construction cost is added once per call."""
    if isinstance(ledgers, RunLedger):
        ledgers = [ledgers]
    tin = tout = 0
    for led in ledgers:
        tin += led.input_tokens
        tout += led.output_tokens
    total = Decimal(tin) * pricing.input_price / MILLION + Decimal(tout) * pricing.output_price / MILLION
    if include_construction:
        total += pricing.construction_cost
    return total


def token_cost(input_tokens: int, output_tokens: int, pricing: PricingConfig = PricingConfig()) -> Decimal:
    return (
        Decimal(input_tokens) * pricing.input_price / MILLION
        + Decimal(output_tokens) * pricing.output_price / MILLION
    )


def compression_budget(n_examples: int, ratio: float | Fraction | str) -> int:
    """Program budget ``max(2, ceil(n_examples / ratio))``."""
    if n_examples < 1:
        raise ValueError("n_examples must be positive")
    r = Fraction(str(ratio)) if not isinstance(ratio, Fraction) else ratio
    if r <= 0:
        raise ValueError("ratio must be positive")
    return max(2, math.ceil(Fraction(n_examples) / r))


def _failing(cascade: Sequence[ReplaceOp], task: Task) -> tuple[int, ...]:
    preds = predictions(cascade, task)
    return tuple(i for i, (p, ex) in enumerate(zip(preds, task.examples)) if p != ex.output)


def hybrid_solve(
    task: Task,
    fallback: FallbackGenerator,
    max_attempts: int = 4,
    mode: Mode = "direct_feedback",
    strategies: Sequence[str] = ALL,
    cfg: StrategyConfig = StrategyConfig(),
    pricing: PricingConfig = PricingConfig(),
    solver_result: SolveResult | None = None,
) -> RunLedger:
    """Run the ensemble; consult the fallback only if it falls short of reward 1.0.

    The returned program is the argmax-reward candidate over the solver result
    and every fallback attempt; ties prefer fewer ops, then the solver, then
    earlier attempts.  Fallback candidates longer than the task budget are
    scored but never selected.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    if mode not in ("best_of_k", "direct_feedback"):
        raise ValueError(f"unknown mode {mode!r}")
    res = solver_result if solver_result is not None else solve_ensemble(task, strategies, cfg)
    ledger = RunLedger(task.task_id, res, final_reward=res.reward, final_program=res.program)
    if res.reward == 1.0:
        return ledger

    ledger.fallback_used = True
    best_key = (res.reward, -res.complexity)
    best_program, best_source = res.program, "solver"

    def consider(attempt: Attempt, index: int) -> float | None:
        nonlocal best_key, best_program, best_source
        ledger.fallback_attempts += 1
        ledger.attempt_usage.append(attempt.usage)
        ledger.input_tokens += attempt.usage.input_tokens
        ledger.output_tokens += attempt.usage.output_tokens
        if attempt.cascade is None:
            return None
        r = reward(attempt.cascade, task)
        if len(attempt.cascade) <= task.max_programs:
            key = (r, -len(attempt.cascade))
            if key > best_key:
                best_key = key
                best_program, best_source = attempt.cascade, f"fallback:{index}"
        return r

    try:
        if mode == "best_of_k":
            for i, att in enumerate(fallback.propose(task, max_attempts, None)[:max_attempts]):
                consider(att, i)
        else:
            for i in range(max_attempts):
                feedback = Feedback(_failing(best_program, task), tuple(best_program))
                atts = fallback.propose(task, 1, feedback)[:1]
                if not atts:
                    break
                consider(atts[0], i)
                if best_key[0] == 1.0:
                    break
    except FallbackError as exc:
        ledger.error = str(exc)
        log.warning("task %s: %s", task.task_id, exc)

    ledger.final_reward = best_key[0]
    ledger.final_program = tuple(best_program)
    ledger.final_source = best_source
    ledger.cost = token_cost(ledger.input_tokens, ledger.output_tokens, pricing)
    return ledger
