import random

import pytest
from hypothesis import given, strategies as st

from cascadesynth.slr import (
    ArityError,
    Car,
    DomainError,
    FactSyntaxError,
    Literal,
    NormalizeError,
    Rule,
    SlrTask,
    TrainModel,
    UnknownPredicateError,
    count_rule_candidates,
    enumerate_rules,
    eval_rule,
    induce_rule,
    normalize,
    parse_facts,
    render_rule,
    render_train,
    score_rule,
    vocabulary,
)
from cascadesynth.taskgen import random_rule, random_train
from oracles import binomial_count, eval_rule_bruteforce


def train(*cars):
    """cars as (color, len, wall) triples, positions 1..n"""
    return TrainModel(
        tuple(Car(i, (("color", c), ("len", l), ("wall", w))) for i, (c, l, w) in enumerate(cars, 1))
    )


def task_of(trains, labels, tid="t"):
    return SlrTask(
        tid, tuple((render_train(t, f"t{i}"), "eastbound" if y else "westbound") for i, (t, y) in enumerate(zip(trains, labels)))
    )


def as_cars(t):
    return [(c.position, dict(c.properties)) for c in t.cars]


def test_parse_examples():
    assert len(parse_facts("has_car(t0, c1). car_color(c1, red).")) == 2
    with pytest.raises(DomainError):
        parse_facts("car_color(c1, purple).")
    with pytest.raises(ArityError):
        parse_facts("has_car(t0).")
    with pytest.raises(UnknownPredicateError):
        parse_facts("has_roof(c1, flat).")
    with pytest.raises(FactSyntaxError):
        parse_facts("has_car(t0, c1")


def test_normalize_examples():
    m = normalize(parse_facts("has_car(t,c). car_num(c,1). car_color(c,red). car_len(c,short)."))
    assert len(m.cars) == 1 and m.cars[0].get("color") == "red"
    m = normalize(parse_facts("has_car(t,x). has_car(t,y). car_num(x,2). car_num(y,1)."))
    assert [c.position for c in m.cars] == [1, 2]
    with pytest.raises(NormalizeError) as err:
        normalize(parse_facts("has_car(t,x). car_num(x,1). car_color(z,red)."))
    assert err.value.kind == "orphan"


def test_render_parse_round_trip():
    rng = random.Random(3)
    for _ in range(50):
        t = random_train(rng, 5)
        text = render_train(t)
        facts = parse_facts(text)
        assert normalize(facts) == t
        again = parse_facts(" ".join(f.render() for f in facts))
        assert again == facts


RED = Literal("color", 1, "red")


def test_eval_examples():
    assert eval_rule(Rule(1, (RED,)), train(("blue", "long", "full"), ("red", "short", "full")))
    assert not eval_rule(Rule(1, (RED,)), train(("blue", "long", "full")))
    both = Rule(1, (RED, Literal("len", 1, "long")))
    assert not eval_rule(both, train(("red", "short", "full"), ("blue", "long", "full")))


def test_distinct_cars():
    two_red = Rule(2, (RED, Literal("color", 2, "red")))
    assert not eval_rule(two_red, train(("red", "short", "full")))
    assert eval_rule(two_red, train(("red", "short", "full"), ("red", "long", "full")))


def test_negation_semantics():
    no_red = Rule(1, (Literal("color", 1, "red", True),))
    assert eval_rule(no_red, train(("blue", "long", "full")))
    assert not eval_rule(no_red, train(("blue", "long", "full"), ("red", "long", "full")))
    # bound: some long car that is not red
    long_not_red = Rule(1, (Literal("len", 1, "long"), Literal("color", 1, "red", True)))
    assert eval_rule(long_not_red, train(("red", "long", "full"), ("blue", "long", "full")))
    assert not eval_rule(long_not_red, train(("red", "long", "full")))


def test_render_rule_forms():
    assert render_rule(Rule(1, (RED,))) == "eastbound(T) :- has_car(T,C1), car_color(C1,red)."
    neg = render_rule(Rule(1, (Literal("color", 1, "red", True),)))
    assert "\\+ (has_car(T,C1), car_color(C1,red))" in neg
    two = render_rule(Rule(2, (RED, Literal("len", 2, "long"))))
    assert "has_car(T,C1)" in two and "has_car(T,C2)" in two


@pytest.mark.parametrize("L,expected", [(1, 1), (5, 30), (11, 561), (19, 5035), (33, 46937), (50, 251175)])
def test_count_rule_candidates(L, expected):
    assert count_rule_candidates(L) == expected


@pytest.mark.parametrize("L", range(1, 13))
def test_count_matches_enumeration(L):
    assert count_rule_candidates(L) == binomial_count(L)


def test_evaluator_matches_brute_force():
    rng = random.Random(9)
    for _ in range(300):
        t = random_train(rng, 5)
        r = random_rule(rng, rng.randint(1, 3), 5)
        assert eval_rule(r, t) == eval_rule_bruteforce(r, as_cars(t))


def test_induce_single_literal():
    trains = [
        train(("red", "short", "full")),
        train(("blue", "long", "full"), ("red", "long", "railing")),
        train(("blue", "short", "full")),
        train(("green", "long", "railing")),
    ]
    res = induce_rule(task_of(trains, [True, True, False, False]))
    rule, score = res.best
    assert res.solved and rule.complexity == 1 and score == 1.0
    assert render_rule(rule) == "eastbound(T) :- has_car(T,C1), car_color(C1,red)."


def _perfect(rule, trains, labels):
    return all(eval_rule_bruteforce(rule, as_cars(t)) == y for t, y in zip(trains, labels))


def test_induce_two_literal_is_minimal():
    trains = [
        train(("red", "long", "full")),
        train(("red", "long", "railing"), ("blue", "short", "full")),
        train(("red", "short", "full"), ("blue", "long", "full")),
        train(("red", "short", "railing"), ("green", "long", "railing")),
        train(("yellow", "long", "full")),
    ]
    labels = [True, True, False, False, False]
    task = task_of(trains, labels)
    res = induce_rule(task)
    rule, score = res.best
    assert score == 1.0 and rule.complexity == 2
    vocab = vocabulary(task.trains())
    assert not any(_perfect(r, trains, labels) for r in enumerate_rules(vocab, 1))


def test_unsatisfiable_labels():
    t = train(("red", "short", "full"))
    task = task_of([t, t], [True, False])
    res = induce_rule(task, max_literals=2, top_k=3)
    assert not res.solved
    assert len(res.ranked) == 3
    ceiling = max(
        score_rule(r, task.trains(), task.labels())
        for k in (1, 2)
        for r in enumerate_rules(vocabulary(task.trains()), k)
    )
    assert res.best[1] <= ceiling == 0.5


def test_single_class_warns():
    t = train(("red", "short", "full"))
    with pytest.warns(UserWarning):
        res = induce_rule(task_of([t, t], [True, True]))
    assert res.single_class


def test_induction_deterministic():
    rng = random.Random(1)
    trains = [random_train(rng, 4) for _ in range(6)]
    labels = [i % 2 == 0 for i in range(6)]
    task = task_of(trains, labels)
    a, b = induce_rule(task, top_k=3), induce_rule(task, top_k=3)
    assert [render_rule(r) for r, _ in a.ranked] == [render_rule(r) for r, _ in b.ranked]


def test_task_json_round_trip():
    t = task_of([train(("red", "short", "full"))] * 2, [True, False])
    assert SlrTask.from_json(t.to_json()) == t
    with pytest.raises(ValueError):
        SlrTask("x", (("has_car(t,c). car_num(c,1).", "northbound"),))


@pytest.mark.filterwarnings("ignore::UserWarning")
@given(st.integers(0, 10_000))
def test_compiled_evaluator_agrees(seed):
    rng = random.Random(seed)
    trains = [random_train(rng, 5) for _ in range(4)]
    labels = [rng.random() < 0.5 for _ in trains]
    res = induce_rule(task_of(trains, labels), max_literals=2, top_k=3)
    for rule, score in res.ranked:
        assert score == pytest.approx(score_rule(rule, trains, labels))
