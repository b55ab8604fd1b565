"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line with its measured value
and runtime.  Run directly (``python tests/test_acceptance.py``) for just the
summary lines.
"""

from __future__ import annotations

import io
import random
import sys
import time
from contextlib import contextmanager
from decimal import Decimal
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cascadesynth.cli import main as cli_main
from cascadesynth.dsl import ReplaceOp, count_programs
from cascadesynth.hybrid import (
    NullFallback,
    OracleFallback,
    PricingConfig,
    RunLedger,
    compression_budget,
    compute_cost,
    hybrid_solve,
)
from cascadesynth.io import write_tasks
from cascadesynth.slr import Literal, Rule, count_rule_candidates, enumerate_rules, eval_rule, induce_rule, vocabulary
from cascadesynth.solvers import ALL, SolveResult, StrategyConfig, solve, solve_ensemble
from cascadesynth.taskgen import GenSpec, classify_bfcc, generate_task, planted_slr_task, random_train
from oracles import brute_force_solvable, comb_sum, eval_rule_bruteforce

_capsys = None


@pytest.fixture(autouse=True)
def _grab(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


def report(cid: str, name: str, ok: bool, detail: str, seconds: float) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] C{cid} {name}: {detail} ({seconds * 1000:.1f} ms)"
    if _capsys is not None:
        with _capsys.disabled():
            print("\n" + line)
    else:
        print(line)


@contextmanager
def timer():
    box = {}
    t0 = time.perf_counter()
    yield box
    box["s"] = time.perf_counter() - t0


# shared corpus for criteria 4 and 5
CORPUS_SPEC = GenSpec(seed=2024)
_corpus: list = []


def corpus():
    if not _corpus:
        _corpus.extend(generate_task(CORPUS_SPEC, i) for i in range(500))
    return _corpus


def test_c01_search_space():
    expected = {13: 5_662_020, 17: 27_243_180, 52: 20_553_379_860}
    with timer() as t:
        got = {v: count_programs(v) for v in expected}
    rounded = {v: f"{got[v]:.2e}" for v in got}
    ok = got == expected and rounded == {13: "5.66e+06", 17: "2.72e+07", 52: "2.06e+10"} and t["s"] < 1e-3
    report("1", "search-space exactness", ok, f"{got}", t["s"])
    assert ok


def test_c02_slr_candidates():
    expected = {5: 30, 11: 561, 19: 5035, 33: 46937, 50: 251175}
    with timer() as t:
        got = {L: count_rule_candidates(L) for L in expected}
    ok = got == expected and all(comb_sum(L) == v for L, v in expected.items()) and t["s"] < 1e-3
    report("2", "SLR candidate-count exactness", ok, f"{got}", t["s"])
    assert ok


def test_c03_oracle_equivalence():
    spec = GenSpec(
        alphabet="abc", cascade_length_range=(1, 2), string_length_range=(1, 6), seed=77, max_programs=2
    )
    solvable = agree = 0
    misses = []
    with timer() as t:
        for i in range(400):
            if solvable == 200:
                break
            task = generate_task(spec, i)
            if not brute_force_solvable(task.inputs, task.outputs, "abc", 2):
                continue
            solvable += 1
            if solve_ensemble(task, ALL).reward == 1.0:
                agree += 1
            else:
                misses.append(task.task_id)
    ok = solvable >= 200 and agree == solvable and t["s"] < 60
    report("3", "oracle equivalence", ok, f"{agree}/{solvable} brute-force-solvable tasks solved {misses[:5]}", t["s"])
    assert ok


def test_c04_determinism(tmp_path):
    tasks_path = tmp_path / "tasks.jsonl"
    write_tasks(tasks_path, corpus())
    outs = []
    with timer() as t:
        for k in range(2):
            out = tmp_path / f"r{k}.jsonl"
            code = cli_main(["solve", str(tasks_path), "--ensemble", "all", "-o", str(out)], io.StringIO(), io.StringIO())
            assert code == 0
            outs.append(out.read_bytes())
    n_lines = outs[0].count(b"\n")
    ok = outs[0] == outs[1] and n_lines == 500 and t["s"] < 120
    report("4", "determinism contract", ok, f"byte-identical={outs[0] == outs[1]}, {n_lines} records", t["s"])
    assert ok


def test_c05_ensemble_monotonicity():
    tasks = corpus()
    with timer() as t:
        single = {sid: [solve(task, sid).reward for task in tasks] for sid in ALL}
        ens = [solve_ensemble(task, ALL).reward for task in tasks]
    violations = sum(e < single[sid][i] for sid in ALL for i, e in enumerate(ens))
    acc = {sid: 100.0 * sum(r == 1.0 for r in rs) / len(tasks) for sid, rs in single.items()}
    ens_acc = 100.0 * sum(r == 1.0 for r in ens) / len(tasks)
    worst = min(acc.values())
    ok = violations == 0 and ens_acc > worst and t["s"] < 180
    detail = f"violations={violations}, ensemble {ens_acc:.1f}% vs " + ", ".join(f"{k} {v:.1f}%" for k, v in acc.items())
    report("5", "ensemble monotonicity", ok, detail, t["s"])
    assert ok


def _replay_touches_solved(program, task) -> bool:
    cur = list(task.inputs)
    for op in program:
        for i, (s, target) in enumerate(zip(cur, task.outputs)):
            if s == target and s.replace(op.pattern, op.replacement) != s:
                return True
        cur = [s.replace(op.pattern, op.replacement) for s in cur]
    return False


def test_c06_safety_invariant():
    cfg = StrategyConfig(safety_mode="strict")
    spec = GenSpec(seed=606, cascade_length_range=(1, 4))
    solved = unsafe = 0
    with timer() as t:
        for i in range(150):
            task = generate_task(spec, i)
            res = solve_ensemble(task, ALL, cfg)
            if res.success:
                solved += 1
                unsafe += _replay_touches_solved(res.program, task)
    ok = solved > 0 and unsafe == 0 and t["s"] < 60
    report("6", "strict safety invariant", ok, f"{solved - unsafe}/{solved} solved tasks replay safely", t["s"])
    assert ok


def test_c07_compression():
    spec = GenSpec(seed=707, n_examples=8, cascade_length_range=(2, 5))
    tasks = [generate_task(spec, i) for i in range(40)]
    ratios = [1, 2, 3, 5]
    means, over = [], 0
    with timer() as t:
        for r in ratios:
            lengths = []
            for task in tasks:
                b = compression_budget(len(task.examples), r)
                assert b == max(2, -(-len(task.examples) // r))
                res = solve_ensemble(task.with_budget(b), ALL)
                over += res.complexity > b
                lengths.append(res.complexity)
            means.append(sum(lengths) / len(lengths))
    monotone = all(a >= b for a, b in zip(means, means[1:]))
    ok = over == 0 and monotone and t["s"] < 120
    detail = "mean length " + " -> ".join(f"{m:.2f}" for m in means) + f" over ratios {ratios}, over-budget={over}"
    report("7", "budget and compression", ok, detail, t["s"])
    assert ok


def test_c08_slr_minimality():
    bad = []
    with timer() as t:
        for i in range(100):
            task, _ = planted_slr_task(i, 1 + i % 3, n_trains=6, max_cars=5)
            trains, labels = task.trains(), task.labels()
            res = induce_rule(task)
            rule, score = res.best
            perfect = all(eval_rule_bruteforce(rule, _cars(tr)) == y for tr, y in zip(trains, labels))
            vocab = vocabulary(trains)
            lower = any(
                all(eval_rule_bruteforce(r, _cars(tr)) == y for tr, y in zip(trains, labels))
                for k in range(1, rule.complexity)
                for r in enumerate_rules(vocab, k)
            )
            if not (res.solved and score == 1.0 and perfect and not lower):
                bad.append(task.task_id)
    ok = not bad and t["s"] < 60
    report("8", "SLR layered minimality", ok, f"{100 - len(bad)}/100 minimal perfect rules {bad[:5]}", t["s"])
    assert ok


def _cars(train):
    return [(c.position, dict(c.properties)) for c in train.cars]


def _random_general_rule(rng: random.Random) -> Rule:
    vocab = [("color", v) for v in ("red", "blue", "green", "yellow", "white")]
    vocab += [("len", "short"), ("len", "long"), ("wall", "full"), ("wall", "railing")]
    vocab += [("num", p) for p in range(1, 6)]
    k = rng.randint(1, 3)
    n_vars = rng.randint(1, k)
    while True:
        vars_ = [rng.randint(1, n_vars) for _ in range(k)]
        if set(vars_) == set(range(1, n_vars + 1)):
            break
    lits = []
    for v in vars_:
        attr, value = rng.choice(vocab)
        lits.append(Literal(attr, v, value, rng.random() < 0.3))
    return Rule(n_vars, tuple(lits))


def test_c09_evaluator_oracle():
    rng = random.Random(909)
    agree = 0
    with timer() as t:
        for _ in range(1000):
            train = random_train(rng, 5)
            rule = _random_general_rule(rng)
            agree += eval_rule(rule, train) == eval_rule_bruteforce(rule, _cars(train))
    ok = agree == 1000 and t["s"] < 10
    report("9", "SLR evaluator oracle", ok, f"{agree}/1000 agree", t["s"])
    assert ok


def test_c10_hybrid_accounting():
    spec = GenSpec(seed=1010, cascade_length_range=(2, 5))
    tasks = [generate_task(spec, i) for i in range(60)]
    leaks = 0
    solved_by_solver = 0
    oracle_ok = 0
    with timer() as t:
        for task in tasks:
            res = solve_ensemble(task, ALL)
            led = hybrid_solve(task, NullFallback(), solver_result=res)
            if res.success:
                solved_by_solver += 1
                leaks += led.input_tokens != 0 or led.output_tokens != 0 or led.cost != 0
                leaks += compute_cost(led) != 0
            oled = hybrid_solve(task, OracleFallback(), solver_result=res)
            oracle_ok += oled.success
        ref = RunLedger("ref", SolveResult(False, (), 0.0, 0, "none"))
        ref.input_tokens = ref.output_tokens = 1_000_000
        price = compute_cost(ref, PricingConfig(Decimal("0.039"), Decimal("0.190")))
    ok = leaks == 0 and oracle_ok == len(tasks) and price == Decimal("0.229") and t["s"] < 60
    detail = (
        f"{solved_by_solver} solver-solved tasks with zero tokens/cost, oracle accuracy "
        f"{100.0 * oracle_ok / len(tasks):.1f}%, 1M+1M tokens cost {price}"
    )
    report("10", "hybrid accounting", ok, detail, t["s"])
    assert ok


def test_c11_bfcc():
    feed = [ReplaceOp("a", "b"), ReplaceOp("b", "c")]
    inputs = ["a", "xa", "aax", "axa"]
    with timer() as t:
        fwd = classify_bfcc(feed, inputs)
        rev = classify_bfcc(feed[::-1], inputs)
    ok = fwd.relations == {"feeding"} and "counterfeeding" in rev and t["s"] < 1
    report("11", "BFCC sanity", ok, f"forward {fwd.sorted()}, reversed {rev.sorted()}", t["s"])
    assert ok


if __name__ == "__main__":
    import tempfile

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_c"):
            continue
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
