import itertools

import pytest

from cascadesynth.dsl import ReplaceOp as R, Task, apply_cascade
from cascadesynth.metrics import reward
from cascadesynth.solvers import (
    ALL,
    STRATEGIES,
    BeamTrace,
    SolveResult,
    StrategyConfig,
    adaptive_beam,
    forced_ops,
    is_safe_cascade,
    resolve,
    solve,
    solve_ensemble,
)
from cascadesynth.taskgen import GenSpec, generate_task
from oracles import all_op_pairs, brute_force_solvable

IDENTITY = Task.from_pairs([("ab", "ab"), ("c", "c")], max_programs=3)


def planted(gt, inputs, budget=None):
    return Task.from_pairs(
        [(s, apply_cascade(gt, s)) for s in inputs], max_programs=budget or len(gt), ground_truth=gt
    )


# the only perfect order of {a->b, b->c} is b->c first (counterbleeding)
COUNTERBLEED = planted([R("b", "c"), R("a", "b")], ["a", "aa", "b", "bb", "ab", "ba"])


@pytest.mark.parametrize("sid", ALL)
def test_identity_task_gives_empty_cascade(sid):
    res = solve(IDENTITY, sid)
    assert res.program == () and res.reward == 1.0 and res.success


@pytest.mark.parametrize("sid", ALL)
def test_single_op_task(sid):
    t = planted([R("a", "b")], ["abc", "cab", "aca"])
    # every single op is a candidate in the oracle; a perfect one exists
    assert any(
        all(s.replace(p, r) == o for s, o in zip(t.inputs, t.outputs)) for p, r in all_op_pairs("abc") if p != r
    )
    res = solve(t, sid)
    assert res.reward == 1.0 and res.complexity == 1


def test_two_phase_needs_unsafe_ops():
    # every substring of "ab" occurs in the solved "aba", so no safe first op exists
    t = Task.from_pairs([("aba", "aba"), ("ab", "c")], max_programs=2)
    safe_ops = [R(p, r) for p, r in all_op_pairs("abc") if p != r and p not in "aba"]
    assert all(op("ab") == "ab" for op in safe_ops)
    assert solve(t, "two_phase_beam", StrategyConfig(safety_mode="strict")).reward < 1.0
    res = solve(t, "two_phase_beam")
    assert res.reward == 1.0
    assert not is_safe_cascade(res.program, t)


def test_lookahead_finds_feeding_pair():
    t = planted([R("a", "b"), R("bx", "c")], ["axa", "aax", "xaa", "ax"])
    assert not brute_force_solvable(t.inputs, t.outputs, "abcx", 1)
    res = solve(t, "safety_greedy")
    assert res.reward == 1.0 and res.complexity == 2


def test_residual_two_independent_fixes():
    t = planted([R("a", "x"), R("b", "y")], ["ac", "aac", "ca", "bc", "bbc", "cb"])
    res = solve(t, "greedy_residual")
    assert res.reward == 1.0 and res.complexity == 2


@pytest.mark.parametrize("sid", ["greedy_residual", "safety_greedy"])
def test_greedy_never_below_empty(sid):
    for i in range(30):
        t = generate_task(GenSpec(seed=5, cascade_length_range=(2, 4)), i)
        assert solve(t, sid).reward >= reward((), t)


def test_counterbleeding_orders():
    b2c, a2b = R("b", "c"), R("a", "b")
    assert reward((b2c, a2b), COUNTERBLEED) == 1.0
    assert reward((a2b, b2c), COUNTERBLEED) < 1.0
    assert solve(COUNTERBLEED, "multistart_reorder").reward == 1.0
    # every changed example proposes both ops, so both are forced
    t = planted([b2c, a2b], ["axb", "axxb", "aaxxbb"])
    assert forced_ops(t) == [a2b, b2c]
    assert reward((a2b, b2c), t) < 1.0
    assert solve(t, "unique_perm").program == (b2c, a2b)


def test_forced_ops_over_cap_still_valid():
    ops = [R(c, c.upper()) for c in "abcdef"]
    t = planted(ops, ["abcdef", "fedcba", "badcfe"], budget=6)
    assert len(forced_ops(t)) == 6 and 720 > StrategyConfig().perm_cap
    res = solve(t, "unique_perm")
    assert res.complexity <= 6 and 0.0 <= res.reward <= 1.0


def test_multistart_determinism():
    t = generate_task(GenSpec(seed=2), 3)
    cfg = StrategyConfig(restarts=1, seed=7)
    assert solve(t, "multistart_reorder", cfg) == solve(t, "multistart_reorder", cfg)


def test_adaptive_width_grows_on_stagnation():
    t = Task.from_pairs([("a", "b"), ("a", "c"), ("ab", "cd")], max_programs=4)
    trace = BeamTrace([], [])
    adaptive_beam(t, StrategyConfig(beam_width=2), trace)
    stalled = [
        d for d in range(1, len(trace.best_keys)) if trace.best_keys[d][:2] <= trace.best_keys[d - 1][:2]
    ]
    assert stalled
    for d in stalled:
        if d + 1 < len(trace.widths):
            assert trace.widths[d + 1] > trace.widths[d]


def test_ensemble_selection_rules():
    t = generate_task(GenSpec(seed=1), 0)
    assert solve_ensemble(t, ["greedy_residual"]) == solve(t, "greedy_residual")
    with pytest.raises(ValueError):
        resolve("nope")
    assert resolve("all") == ALL


def test_ensemble_tie_breaks(monkeypatch):
    t = IDENTITY
    fake = {
        "A": SolveResult(False, (R("a", "b"),), 0.8, 1, "A"),
        "B": SolveResult(True, (R("a", "b"),) * 3, 1.0, 3, "B"),
        "C": SolveResult(True, (R("a", "b"),) * 5, 1.0, 5, "C"),
    }
    for k, v in fake.items():
        monkeypatch.setitem(STRATEGIES, k, lambda task, cfg, v=v: v)
    assert solve_ensemble(t, ["A", "B"]).strategy_id == "B"
    assert solve_ensemble(t, ["C", "B"]).strategy_id == "B"
    assert solve_ensemble(t, ["B", "B"]).strategy_id == "B"


@pytest.mark.parametrize("sid", ALL)
def test_budget_and_determinism(sid):
    spec = GenSpec(seed=11, cascade_length_range=(2, 4))
    for i in range(15):
        t = generate_task(spec, i)
        a, b = solve(t, sid), solve(t, sid)
        assert a == b
        assert a.complexity <= t.max_programs
        assert a.reward == reward(a.program, t)
        assert a.success == (a.reward == 1.0)


def test_ensemble_union_monotone():
    spec = GenSpec(seed=4, cascade_length_range=(2, 4))
    for i in range(15):
        t = generate_task(spec, i)
        for k in range(1, len(ALL)):
            assert solve_ensemble(t, ALL[: k + 1]).reward >= solve_ensemble(t, ALL[:k]).reward


def test_strict_mode_is_safe():
    spec = GenSpec(seed=8, cascade_length_range=(1, 3))
    cfg = StrategyConfig(safety_mode="strict")
    for i in range(15):
        t = generate_task(spec, i)
        for sid in ALL:
            res = solve(t, sid, cfg)
            if res.success and sid in ("two_phase_beam", "safety_greedy", "greedy_residual", "unique_perm", "multistart_reorder"):
                assert is_safe_cascade(res.program, t)


def test_config_validation():
    with pytest.raises(ValueError):
        StrategyConfig(beam_width=0)
    with pytest.raises(ValueError):
        StrategyConfig(safety_mode="maybe")
