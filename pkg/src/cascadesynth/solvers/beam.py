"""Beam-search strategies: two-phase safe/unrestricted and adaptive-width."""

from __future__ import annotations

from dataclasses import dataclass

from ..dsl import Cascade, Task
from .core import Key, Search, SolveResult, StrategyConfig, Strings, is_degenerate


@dataclass
class _Node:
    key: Key
    currents: Strings
    program: Cascade


@dataclass
class BeamTrace:
    widths: list[int]
    best_keys: list[Key]


def _beam(
    search: Search,
    width: int,
    safe: bool,
    adaptive: bool = False,
    trace: BeamTrace | None = None,
) -> _Node:
    start = search.inputs
    root = _Node(search.key(start, 0), start, ())
    best = root
    beam = [root]
    seen = {start}
    max_width = 4 * width
    for depth in range(1, search.budget + 1):
        if trace is not None:
            trace.widths.append(width)
        children: dict[Strings, _Node] = {}
        finished = None
        for node in beam:
            for op in search.candidates(node.currents, safe):
                nxt = search.apply(node.currents, op)
                if nxt in seen or nxt in children:
                    continue
                program = node.program + (op,)
                children[nxt] = _Node(search.key(nxt, depth), nxt, program)
                if finished is None and depth < search.budget and not search.perfect(nxt):
                    last = search.finisher(nxt, safe)
                    if last is not None:
                        done = program + (last,)
                        finished = _Node(search.key(search.targets, len(done)), search.targets, done)
        if not children:
            break
        ranked = sorted(children.values(), key=lambda n: n.key, reverse=True)
        if finished is not None and not search.perfect(ranked[0].currents):
            return finished
        if adaptive:
            # diversity: no two beam entries may end with the same op
            picked, last_ops = [], set()
            for n in ranked:
                if n.program[-1] in last_ops:
                    continue
                last_ops.add(n.program[-1])
                picked.append(n)
                if len(picked) == width:
                    break
            beam = picked
        else:
            beam = ranked[:width]
        seen.update(n.currents for n in beam)
        improved = ranked[0].key[:2] > best.key[:2]
        if ranked[0].key > best.key:
            best = ranked[0]
        if trace is not None:
            trace.best_keys.append(best.key)
        if search.perfect(best.currents):
            break
        if adaptive and not improved:
            width = min(2 * width, max_width)
    return best


def solve_two_phase_beam(task: Task, cfg: StrategyConfig = StrategyConfig()) -> SolveResult:
    """Beam search, first restricted to ops that leave solved examples untouched.

    With ``safety_mode="two_phase"`` an unrestricted second pass runs only if
    the safe pass finds no perfect cascade; ``"strict"`` stops after the safe
    pass and ``"off"`` runs only the unrestricted one.
    """
    sid = "two_phase_beam"
    search = Search(task, cfg)
    if is_degenerate(task):
        return search.result((), sid)
    best = None
    if cfg.safety_mode in ("strict", "two_phase"):
        best = _beam(search, cfg.beam_width, safe=True)
        if search.perfect(best.currents) or cfg.safety_mode == "strict":
            return search.result(best.program, sid)
    relaxed = _beam(search, cfg.beam_width, safe=False)
    if best is None or relaxed.key > best.key:
        best = relaxed
    return search.result(best.program, sid)


def adaptive_beam(task: Task, cfg: StrategyConfig, trace: BeamTrace | None = None) -> SolveResult:
    sid = "adaptive_beam"
    search = Search(task, cfg)
    if is_degenerate(task):
        return search.result((), sid)
    safe = cfg.safety_mode == "strict"
    best = _beam(search, cfg.beam_width, safe=safe, adaptive=True, trace=trace)
    return search.result(best.program, sid)


def solve_adaptive_beam(task: Task, cfg: StrategyConfig = StrategyConfig()) -> SolveResult:
    """Beam whose width doubles (up to 4x) after a depth without progress.

    Unrestricted unless ``cfg.safety_mode`` is ``"strict"``.
    """
    return adaptive_beam(task, cfg)
