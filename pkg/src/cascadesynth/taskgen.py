"""Synthetic PBE tasks with planted cascades, rule-interaction labels, and SLR trains."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .slr import DOMAINS, Car, Literal, Rule, SlrTask, TrainModel, eval_rule, render_train
from .dsl import (
    BOUNDARY,
    Cascade,
    Example,
    ReplaceOp,
    Task,
    TaskMeta,
    apply_cascade,
    wrap_boundaries,
)

RELATIONS = ("bleeding", "counterbleeding", "counterfeeding", "feeding")
MAX_REJECTS = 1000


class GenerationExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class GenSpec:
    alphabet: str = "abcde"
    cascade_length_range: tuple[int, int] = (2, 5)
    n_examples: int = 5
    string_length_range: tuple[int, int] = (3, 8)
    seed: int = 0
    wrap_boundaries: bool = False
    max_programs: int | None = None

    def __post_init__(self) -> None:
        lo, hi = self.cascade_length_range
        if not 1 <= lo <= hi:
            raise ValueError("cascade_length_range must satisfy 1 <= min <= max")
        slo, shi = self.string_length_range
        if not 0 <= slo <= shi:
            raise ValueError("string_length_range must satisfy 0 <= min <= max")
        if self.n_examples < 5:
            raise ValueError("n_examples must be at least 5")
        if not self.alphabet:
            raise ValueError("alphabet must be non-empty")
        if self.max_programs is not None and self.max_programs < hi:
            raise ValueError("max_programs must cover the longest planted cascade")

    @property
    def budget(self) -> int:
        return self.max_programs if self.max_programs is not None else self.cascade_length_range[1]


@dataclass(frozen=True)
class BfccLabel:
    relations: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        extra = set(self.relations) - set(RELATIONS)
        if extra:
            raise ValueError(f"unknown relations {sorted(extra)}")

    def __contains__(self, item: str) -> bool:
        return item in self.relations

    def sorted(self) -> tuple[str, ...]:
        return tuple(sorted(self.relations))


def _random_string(rng: random.Random, chars: Sequence[str], lo: int, hi: int) -> str:
    return "".join(rng.choice(chars) for _ in range(rng.randint(lo, hi)))


def _random_op(rng: random.Random, chars: Sequence[str], sources: Sequence[str]) -> ReplaceOp:
    while True:
        plen = rng.choices((1, 2, 3), weights=(6, 3, 1))[0]
        # bias patterns toward substrings that actually occur so ops fire
        src = rng.choice(sources) if sources else ""
        if len(src) >= plen and rng.random() < 0.8:
            start = rng.randrange(len(src) - plen + 1)
            pattern = src[start : start + plen]
        else:
            pattern = "".join(rng.choice(chars) for _ in range(plen))
        rlen = rng.choices((0, 1, 2, 3), weights=(2, 5, 2, 1))[0]
        replacement = "".join(rng.choice(chars) for _ in range(rlen))
        if pattern != replacement:
            return ReplaceOp(pattern, replacement)


def generate_task(spec: GenSpec, index: int) -> Task:
    """Deterministic in ``(spec.seed, index)``.

    Rejects samples where fewer than two examples change or a non-empty input
    maps to an empty output.
    """
    rng = random.Random(f"{spec.seed}:{index}")
    chars = list(dict.fromkeys(spec.alphabet))
    op_chars = chars + [BOUNDARY] if spec.wrap_boundaries and BOUNDARY not in chars else chars
    lo, hi = spec.cascade_length_range
    slo, shi = spec.string_length_range
    for _ in range(MAX_REJECTS):
        inputs = [_random_string(rng, chars, slo, shi) for _ in range(spec.n_examples)]
        if spec.wrap_boundaries:
            inputs = [wrap_boundaries(s) for s in inputs]
        length = rng.randint(lo, hi)
        cascade: list[ReplaceOp] = []
        states = list(inputs)
        for _ in range(length):
            op = _random_op(rng, op_chars, states)
            cascade.append(op)
            states = [op(s) for s in states]
        outputs = [apply_cascade(cascade, s) for s in inputs]
        changed = sum(a != b for a, b in zip(inputs, outputs))
        if changed < 2 or any(a and not b for a, b in zip(inputs, outputs)):
            continue
        gt: Cascade = tuple(cascade)
        bfcc = classify_bfcc(gt, inputs).sorted() if len(gt) >= 2 else ()
        alphabet = tuple(op_chars)
        extra = sorted({c for s in inputs + outputs for c in s} - set(alphabet))
        return Task(
            task_id=f"gen-{spec.seed}-{index:05d}",
            examples=tuple(Example(a, b) for a, b in zip(inputs, outputs)),
            max_programs=spec.budget,
            alphabet=alphabet + tuple(extra),
            meta=TaskMeta(ground_truth=gt, cascade_length=len(gt), bfcc=bfcc),
        )
    raise GenerationExhausted(f"no acceptable task after {MAX_REJECTS} samples (index {index})")


def classify_bfcc(cascade: Sequence[ReplaceOp], inputs: Sequence[str]) -> BfccLabel:
    """Label the pairwise interactions of a cascade on the given inputs.

    For each ordered pair ``i < j`` the comparison is made at the state ``s``
    right before op ``i`` runs:

    * feeding: op ``i`` raises the number of op ``j`` sites and op ``j`` later fires;
    * bleeding: op ``j`` had sites in ``s`` and op ``i`` removes some;
    * counterfeeding: op ``j`` run on ``s`` would create op ``i`` sites;
    * counterbleeding: op ``i`` fires on ``s`` and op ``j`` run on ``s`` would remove some of its sites.
    """
    if len(cascade) < 2:
        raise ValueError("BFCC classification needs at least two ops")
    found: set[str] = set()
    for x in inputs:
        states = [x]
        for op in cascade:
            states.append(op(states[-1]))
        for i, ri in enumerate(cascade):
            s = states[i]
            after_i = states[i + 1]
            pi_sites = s.count(ri.pattern)
            for j in range(i + 1, len(cascade)):
                rj = cascade[j]
                pj_before = s.count(rj.pattern)
                pj_after = after_i.count(rj.pattern)
                if pj_after > pj_before and rj.pattern in states[j]:
                    found.add("feeding")
                if pj_before and pj_after < pj_before:
                    found.add("bleeding")
                swapped = rj(s)
                pi_swapped = swapped.count(ri.pattern)
                if pi_swapped > pi_sites:
                    found.add("counterfeeding")
                if pi_sites and pi_swapped < pi_sites:
                    found.add("counterbleeding")
    return BfccLabel(frozenset(found))


def random_train(rng: random.Random, max_cars: int) -> TrainModel:
    cars = []
    for pos in range(1, rng.randint(1, max_cars) + 1):
        props = tuple((attr, rng.choice(DOMAINS[attr])) for attr in ("color", "len", "wall"))
        cars.append(Car(pos, props))
    return TrainModel(tuple(cars))


def generate_slr_instance(
    n_trains: int, max_cars: int, gt_rule: Rule, seed: int, task_id: str | None = None
) -> SlrTask:
    """Random trains labelled by ``gt_rule``; resampled until both labels occur."""
    if n_trains < 2:
        raise ValueError("need at least two trains")
    if max_cars < 1:
        raise ValueError("max_cars must be positive")
    rng = random.Random(f"slr:{seed}")
    for _ in range(MAX_REJECTS):
        trains = [random_train(rng, max_cars) for _ in range(n_trains)]
        labels = [eval_rule(gt_rule, t) for t in trains]
        if all(labels) or not any(labels):
            continue
        examples = tuple(
            (render_train(t, f"t{i}"), "eastbound" if y else "westbound")
            for i, (t, y) in enumerate(zip(trains, labels))
        )
        return SlrTask(task_id or f"slr-{seed}", examples)
    raise GenerationExhausted(f"could not get both labels after {MAX_REJECTS} samples")


def random_rule(rng: random.Random, complexity: int, max_cars: int) -> Rule:
    """A random rule from the induction search space (used to plant SLR tasks)."""
    vocab = [(a, v) for a in ("color", "len", "wall") for v in DOMAINS[a]]
    vocab += [("num", p) for p in range(1, max_cars + 1)]
    while True:
        family = rng.choice(("one", "one", "neg", "two")) if complexity >= 2 else rng.choice(("one", "neg"))
        if family == "one":
            picks = rng.sample(vocab, complexity)
            lits = [Literal(a, 1, v) for a, v in picks]
        elif family == "neg":
            picks = rng.sample(vocab, complexity)
            lits = [Literal(a, 1, v) for a, v in picks[:-1]]
            a, v = picks[-1]
            lits.append(Literal(a, 2 if lits else 1, v, True))
        else:
            picks = rng.sample(vocab, complexity)
            split = rng.randint(1, complexity - 1)
            lits = [Literal(a, 1, v) for a, v in picks[:split]] + [
                Literal(a, 2, v) for a, v in picks[split:]
            ]
        attrs_ok = all(
            len({l.attr for l in lits if l.var == var and not l.negated})
            == len([l for l in lits if l.var == var and not l.negated])
            for var in {l.var for l in lits}
        )
        positive = {(l.attr, l.value) for l in lits if not l.negated}
        contradictory = any(l.negated and (l.attr, l.value) in positive for l in lits)
        if attrs_ok and not contradictory:
            return Rule(max(l.var for l in lits), tuple(lits))


def planted_slr_task(
    seed: int, complexity: int, n_trains: int = 6, max_cars: int = 5
) -> tuple[SlrTask, Rule]:
    """Draw random rules of the given complexity until one yields a two-label instance."""
    rng = random.Random(f"planted:{seed}:{complexity}")
    for attempt in range(100):
        rule = random_rule(rng, complexity, max_cars)
        try:
            task = generate_slr_instance(n_trains, max_cars, rule, rng.randrange(2**32),
                                         task_id=f"slr-{seed}-{complexity}")
        except GenerationExhausted:
            continue
        return task, rule
    raise GenerationExhausted("no usable planted rule")
