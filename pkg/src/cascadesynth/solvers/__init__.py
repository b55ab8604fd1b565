"""PBE solver strategies and their union ensemble."""

from __future__ import annotations

from typing import Callable, Sequence

from ..dsl import Task
from .beam import BeamTrace, adaptive_beam, solve_adaptive_beam, solve_two_phase_beam
from .core import SolveResult, StrategyConfig, is_degenerate, is_safe_cascade
from .greedy import solve_greedy_residual, solve_safety_greedy_lookahead
from .perm import forced_ops, solve_multistart_reorder, solve_unique_op_permutations

Strategy = Callable[[Task, StrategyConfig], SolveResult]

STRATEGIES: dict[str, Strategy] = {
    "two_phase_beam": solve_two_phase_beam,
    "safety_greedy": solve_safety_greedy_lookahead,
    "greedy_residual": solve_greedy_residual,
    "unique_perm": solve_unique_op_permutations,
    "multistart_reorder": solve_multistart_reorder,
    "adaptive_beam": solve_adaptive_beam,
}
ALL = tuple(STRATEGIES)


def resolve(spec: str | Sequence[str]) -> tuple[str, ...]:
    """Turn ``"all"``, ``"a,b"`` or a list of ids into validated strategy ids."""
    if isinstance(spec, str):
        ids = ALL if spec == "all" else tuple(s.strip() for s in spec.split(",") if s.strip())
    else:
        ids = tuple(spec)
    if not ids:
        raise ValueError("empty strategy list")
    unknown = [s for s in ids if s not in STRATEGIES]
    if unknown:
        raise ValueError(f"unknown strategy id(s): {', '.join(unknown)}")
    return ids


def solve(task: Task, strategy: str, cfg: StrategyConfig = StrategyConfig()) -> SolveResult:
    return STRATEGIES[strategy](task, cfg)


def solve_ensemble(
    task: Task,
    strategies: Sequence[str] = ALL,
    cfg: StrategyConfig = StrategyConfig(),
) -> SolveResult:
    """Run every strategy and keep the max-reward result.

    Ties go to the shorter cascade, then to the earlier strategy in the list.
    """
    ids = resolve(strategies)
    best = None
    evaluated = 0
    for sid in ids:
        res = STRATEGIES[sid](task, cfg)
        evaluated += res.candidates_evaluated
        if best is None or (res.reward, -res.complexity) > (best.reward, -best.complexity):
            best = res
    return SolveResult(
        best.success, best.program, best.reward, best.complexity, best.strategy_id, evaluated
    )


__all__ = [
    "ALL",
    "STRATEGIES",
    "BeamTrace",
    "SolveResult",
    "StrategyConfig",
    "adaptive_beam",
    "forced_ops",
    "is_degenerate",
    "is_safe_cascade",
    "resolve",
    "solve",
    "solve_adaptive_beam",
    "solve_ensemble",
    "solve_greedy_residual",
    "solve_multistart_reorder",
    "solve_safety_greedy_lookahead",
    "solve_two_phase_beam",
    "solve_unique_op_permutations",
]
