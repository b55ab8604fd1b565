"""Relational train classification: ground-fact parsing, train models, rule induction.

Trains are described by ground facts over five predicates::

    has_car(Train, Car)  car_num(Car, N)  car_color(Car, Color)
    car_len(Car, Length)  has_wall(Car, WallType)

Rules have the form ``eastbound(T) :- has_car(T,C1), ..., lit1, lit2, ...``.
Body literals test one attribute of one car variable; a literal may be
negated.  Car variables bind distinct cars.  A negated literal on a variable
that some positive literal binds tests that same car; on a variable that only
appears negated it asserts that no car of the train has the property.
"""

from __future__ import annotations

import itertools
import json
import math
import re
import subprocess
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

DOMAINS: dict[str, tuple[str, ...]] = {
    "color": ("red", "blue", "green", "yellow", "white"),
    "len": ("short", "long"),
    "wall": ("full", "railing"),
}
ATTRIBUTE_ORDER = ("color", "len", "wall", "num")
PREDICATE_ATTR = {"car_color": "color", "car_len": "len", "has_wall": "wall", "car_num": "num"}
ATTR_PREDICATE = {v: k for k, v in PREDICATE_ATTR.items()}
PREDICATES = ("has_car", "car_num", "car_color", "car_len", "has_wall")
LABELS = ("eastbound", "westbound")


class FactError(ValueError):
    kind = "fact"


class FactSyntaxError(FactError):
    kind = "syntax"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownPredicateError(FactError):
    kind = "unknown_predicate"


class ArityError(FactError):
    kind = "arity"


class DomainError(FactError):
    kind = "domain"


class NormalizeError(ValueError):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class Fact:
    predicate: str
    args: tuple[str | int, ...]

    def render(self) -> str:
        return f"{self.predicate}({', '.join(str(a) for a in self.args)})."


_FACT_RE = re.compile(r"\s*([a-z][A-Za-z0-9_]*)\s*\(\s*([^()]*?)\s*\)\s*\.")
_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*|[1-9][0-9]*")


def parse_facts(text: str) -> list[Fact]:
    """Parse period-terminated ground facts separated by whitespace."""
    facts = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _FACT_RE.match(text, pos)
        if not m:
            raise FactSyntaxError("expected pred(arg, arg).", len(text[:pos].encode()))
        pred, raw = m.group(1), m.group(2)
        args: list[str | int] = []
        for piece in raw.split(","):
            piece = piece.strip()
            if not _ATOM_RE.fullmatch(piece):
                raise FactSyntaxError(f"bad atom {piece!r}", len(text[: m.start(2)].encode()))
            args.append(int(piece) if piece[0].isdigit() else piece)
        facts.append(_check_fact(pred, tuple(args)))
        pos = m.end()
    return facts


def _check_fact(pred: str, args: tuple[str | int, ...]) -> Fact:
    if pred not in PREDICATES:
        raise UnknownPredicateError(f"unknown predicate {pred!r}")
    if len(args) != 2:
        raise ArityError(f"{pred} expects 2 arguments, got {len(args)}")
    subject, value = args
    if not isinstance(subject, str):
        raise DomainError(f"{pred}: first argument must be an identifier")
    if pred == "has_car":
        if not isinstance(value, str):
            raise DomainError("has_car: car must be an identifier")
    elif pred == "car_num":
        if not isinstance(value, int):
            raise DomainError(f"car_num: {value!r} is not a positive integer")
    else:
        domain = DOMAINS[PREDICATE_ATTR[pred]]
        if value not in domain:
            raise DomainError(f"{pred}: {value!r} not in {domain}")
    return Fact(pred, args)


@dataclass(frozen=True)
class Car:
    position: int
    properties: tuple[tuple[str, str], ...]

    def get(self, attr: str) -> str | int | None:
        if attr == "num":
            return self.position
        return dict(self.properties).get(attr)


@dataclass(frozen=True)
class TrainModel:
    cars: tuple[Car, ...]


def normalize(facts: Iterable[Fact]) -> TrainModel:
    """Build a train model keyed by car position; train and car names are dropped."""
    facts = list(facts)
    declared = [f.args[1] for f in facts if f.predicate == "has_car"]
    cars = set(declared)
    nums: dict[str, int] = {}
    props: dict[str, dict[str, str]] = {c: {} for c in declared}
    for f in facts:
        if f.predicate == "has_car":
            continue
        car, value = f.args
        if car not in cars:
            raise NormalizeError("orphan", f"{f.render()} refers to undeclared car {car!r}")
        if f.predicate == "car_num":
            if car in nums and nums[car] != value:
                raise NormalizeError("duplicate_num", f"car {car!r} has two car_num facts")
            nums[car] = value
        else:
            attr = PREDICATE_ATTR[f.predicate]
            if props[car].get(attr, value) != value:
                raise NormalizeError("conflict", f"car {car!r} has conflicting {attr}")
            props[car][attr] = value
    for car in dict.fromkeys(declared):
        if car not in nums:
            raise NormalizeError("missing_num", f"car {car!r} has no car_num")
    positions = list(nums.values())
    if len(set(positions)) != len(positions):
        raise NormalizeError("duplicate_num", "two cars share a car_num")
    model = [
        Car(nums[c], tuple((a, props[c][a]) for a in ATTRIBUTE_ORDER if a in props[c]))
        for c in dict.fromkeys(declared)
    ]
    return TrainModel(tuple(sorted(model, key=lambda c: c.position)))


def render_train(train: TrainModel, train_id: str = "t0") -> str:
    parts = []
    for car in train.cars:
        cid = f"{train_id}_c{car.position}"
        parts.append(f"has_car({train_id}, {cid}).")
        parts.append(f"car_num({cid}, {car.position}).")
        for attr, value in car.properties:
            parts.append(f"{ATTR_PREDICATE[attr]}({cid}, {value}).")
    return " ".join(parts)


@dataclass(frozen=True, order=True)
class Literal:
    attr: str
    var: int
    value: str | int
    negated: bool = False

    def __post_init__(self) -> None:
        if self.attr not in ATTRIBUTE_ORDER:
            raise ValueError(f"unknown attribute {self.attr!r}")
        if self.attr == "num":
            if not (isinstance(self.value, int) and self.value >= 1):
                raise ValueError("num literal needs a positive integer")
        elif self.value not in DOMAINS[self.attr]:
            raise ValueError(f"{self.value!r} not in the {self.attr} domain")
        if self.var < 1:
            raise ValueError("car variables are numbered from 1")

    def holds(self, car: Car) -> bool:
        return car.get(self.attr) == self.value

    def render(self, var: str) -> str:
        return f"{ATTR_PREDICATE[self.attr]}({var},{self.value})"


@dataclass(frozen=True)
class Rule:
    car_vars: int
    literals: tuple[Literal, ...]

    def __post_init__(self) -> None:
        if not self.literals:
            raise ValueError("a rule needs at least one body literal")
        used = {lit.var for lit in self.literals}
        if used != set(range(1, self.car_vars + 1)):
            raise ValueError("every car variable must appear in some literal")

    @property
    def complexity(self) -> int:
        return len(self.literals)

    @property
    def bound_vars(self) -> tuple[int, ...]:
        return tuple(sorted({lit.var for lit in self.literals if not lit.negated}))


def eval_rule(rule: Rule, train: TrainModel) -> bool:
    """Existential evaluation with distinct car bindings and negation as failure."""
    bound = rule.bound_vars
    positive = [lit for lit in rule.literals if not lit.negated]
    negated = [lit for lit in rule.literals if lit.negated]
    for lit in negated:
        if lit.var not in bound and any(lit.holds(c) for c in train.cars):
            return False
    local = [lit for lit in negated if lit.var in bound]

    def search(k: int, env: dict[int, Car], used: set[int]) -> bool:
        if k == len(bound):
            return all(not lit.holds(env[lit.var]) for lit in local)
        v = bound[k]
        for car in train.cars:
            if car.position in used:
                continue
            if all(lit.holds(car) for lit in positive if lit.var == v):
                env[v] = car
                used.add(car.position)
                if search(k + 1, env, used):
                    return True
                used.discard(car.position)
        return False

    return search(0, {}, set())


def render_rule(rule: Rule) -> str:
    bound = set(rule.bound_vars)
    body = [f"has_car(T,C{v})" for v in sorted(bound)]
    for lit in rule.literals:
        var = f"C{lit.var}"
        if not lit.negated:
            body.append(lit.render(var))
        elif lit.var in bound:
            body.append(f"\\+ ({lit.render(var)})")
        else:
            body.append(f"\\+ (has_car(T,{var}), {lit.render(var)})")
    return f"eastbound(T) :- {', '.join(body)}."


def count_rule_candidates(L: int) -> int:
    """Conjunctions of up to four of ``L`` ground literals."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return sum(math.comb(L, k) for k in range(1, 5))


@dataclass(frozen=True)
class SlrTask:
    task_id: str
    examples: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if not self.examples:
            raise ValueError(f"SLR task {self.task_id!r} has no examples")
        for facts, label in self.examples:
            if label not in LABELS:
                raise ValueError(f"{self.task_id}: bad label {label!r}")

    def trains(self) -> list[TrainModel]:
        return [normalize(parse_facts(text)) for text, _ in self.examples]

    def labels(self) -> list[bool]:
        return [label == "eastbound" for _, label in self.examples]

    def to_json(self) -> str:
        return json.dumps(
            {"task_id": self.task_id, "examples": [list(e) for e in self.examples]},
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str | dict) -> SlrTask:
        d = json.loads(line) if isinstance(line, str) else line
        return cls(d["task_id"], tuple((facts, label) for facts, label in d["examples"]))


def vocabulary(trains: Sequence[TrainModel]) -> list[tuple[str, str | int]]:
    """Attribute-value pairs present in the trains, in canonical order."""
    present = {(a, v) for t in trains for c in t.cars for a, v in c.properties}
    present |= {("num", c.position) for t in trains for c in t.cars}
    out: list[tuple[str, str | int]] = []
    for attr in ATTRIBUTE_ORDER:
        if attr == "num":
            out.extend(sorted(p for p in present if p[0] == "num"))
        else:
            out.extend((attr, v) for v in DOMAINS[attr] if (attr, v) in present)
    return out


def _consistent(group: Sequence[tuple[str, str | int]]) -> bool:
    attrs = [a for a, _ in group]
    return len(attrs) == len(set(attrs))


def enumerate_rules(
    vocab: Sequence[tuple[str, str | int]], complexity: int
) -> Iterator[Rule]:
    """Every candidate rule with ``complexity`` literals, in a fixed order.

    Families per layer: one-car conjunctions; "no car has X" plus a one-car
    conjunction; "a car with ... that lacks X"; two-car conjunctions.  Groups
    setting one attribute twice on the same car are skipped as unsatisfiable.
    """
    k = complexity
    idx = range(len(vocab))

    def lits(combo, var, negated=False):
        return tuple(Literal(vocab[i][0], var, vocab[i][1], negated) for i in combo)

    for combo in itertools.combinations(idx, k):
        group = [vocab[i] for i in combo]
        if _consistent(group):
            yield Rule(1, lits(combo, 1))
    for neg in idx:
        for combo in itertools.combinations(idx, k - 1):
            if neg in combo or not _consistent([vocab[i] for i in combo]):
                continue
            if k == 1:
                yield Rule(1, (Literal(vocab[neg][0], 1, vocab[neg][1], True),))
            else:
                yield Rule(2, lits(combo, 1) + (Literal(vocab[neg][0], 2, vocab[neg][1], True),))
    if k >= 2:
        for neg in idx:
            for combo in itertools.combinations(idx, k - 1):
                group = [vocab[i] for i in combo]
                if neg in combo or not _consistent(group):
                    continue
                if vocab[neg][0] in {a for a, _ in group}:
                    continue  # implied by, or contradicting, a positive literal
                yield Rule(1, lits(combo, 1) + (Literal(vocab[neg][0], 1, vocab[neg][1], True),))
        for k1 in range(1, k // 2 + 1):
            k2 = k - k1
            for c1 in itertools.combinations(idx, k1):
                if not _consistent([vocab[i] for i in c1]):
                    continue
                for c2 in itertools.combinations(idx, k2):
                    if k1 == k2 and c2 < c1:
                        continue
                    if not _consistent([vocab[i] for i in c2]):
                        continue
                    yield Rule(2, lits(c1, 1) + lits(c2, 2))


class _Compiled:
    """Per-train bitmasks of the cars satisfying each vocabulary literal."""

    def __init__(self, trains: Sequence[TrainModel]):
        self.trains = trains
        self.masks: list[dict[tuple[str, str | int], int]] = []
        for t in trains:
            m: dict[tuple[str, str | int], int] = {}
            for bit, car in enumerate(t.cars):
                for key in [("num", car.position), *car.properties]:
                    m[key] = m.get(key, 0) | (1 << bit)
            self.masks.append(m)

    def evaluate(self, rule: Rule, t: int) -> bool:
        masks = self.masks[t]
        full = (1 << len(self.trains[t].cars)) - 1
        bound = rule.bound_vars
        per_var: dict[int, int] = {}
        for lit in rule.literals:
            m = masks.get((lit.attr, lit.value), 0)
            if lit.negated:
                if lit.var not in bound:
                    if m:
                        return False
                    continue
                m = full & ~m
            per_var[lit.var] = per_var.get(lit.var, full) & m
        sets = list(per_var.values())
        if any(s == 0 for s in sets):
            return False
        if len(sets) <= 1:
            return True
        if len(sets) == 2:
            a, b = sets
            return not (a == b and a & (a - 1) == 0)
        return _distinct_choice(sets)


def _distinct_choice(sets: list[int]) -> bool:
    def go(i: int, used: int) -> bool:
        if i == len(sets):
            return True
        avail = sets[i] & ~used
        while avail:
            bit = avail & -avail
            if go(i + 1, used | bit):
                return True
            avail ^= bit
        return False

    return go(0, 0)


@dataclass
class InductionResult:
    ranked: list[tuple[Rule, float]]
    solved: bool
    single_class: bool = False
    evaluated: int = 0
    layers_searched: int = 0

    @property
    def best(self) -> tuple[Rule, float] | None:
        return self.ranked[0] if self.ranked else None


def score_rule(rule: Rule, trains: Sequence[TrainModel], labels: Sequence[bool]) -> float:
    hits = sum(eval_rule(rule, t) == y for t, y in zip(trains, labels))
    return hits / len(trains)


def induce_rule(task: SlrTask, max_literals: int = 4, top_k: int = 5) -> InductionResult:
    """Layered search over rule complexity; stops at the first layer with a perfect rule.

    Within a layer the first perfect rule in enumeration order wins.  Without a
    perfect rule, the ``top_k`` best rules by (score desc, complexity asc,
    enumeration order) are returned.
    """
    if top_k < 1:
        raise ValueError("top_k must be positive")
    trains = task.trains()
    labels = task.labels()
    single = len(set(labels)) < 2
    if single:
        warnings.warn(f"{task.task_id}: all trains share one label", stacklevel=2)
    compiled = _Compiled(trains)
    vocab = vocabulary(trains)
    n = len(trains)
    pool: list[tuple[float, int, int, Rule]] = []
    order = 0
    layers = 0
    for k in range(1, max_literals + 1):
        layers = k
        for rule in enumerate_rules(vocab, k):
            hits = 0
            for t in range(n):
                if compiled.evaluate(rule, t) == labels[t]:
                    hits += 1
            score = hits / n
            order += 1
            if hits == n:
                rest = sorted(pool, key=lambda e: (-e[0], e[1], e[2]))[: top_k - 1]
                ranked = [(rule, 1.0)] + [(r, s) for s, _, _, r in rest]
                return InductionResult(ranked, True, single, order, layers)
            pool.append((score, k, order, rule))
            if len(pool) > 4 * top_k:
                pool = sorted(pool, key=lambda e: (-e[0], e[1], e[2]))[:top_k]
    pool.sort(key=lambda e: (-e[0], e[1], e[2]))
    return InductionResult([(r, s) for s, _, _, r in pool[:top_k]], False, single, order, layers)


def external_score(rule_text: str, task_path: str, command: str, timeout: float = 60.0) -> float:
    """Score a rendered rule with an external verifier.

    The command receives the task file path as its last argument and the rule
    text on stdin, and must print the score as a decimal.
    """
    proc = subprocess.run(
        [*command.split(), task_path],
        input=rule_text,
        capture_output=True,
        text=True,
        timeout=timeout,
        check=True,
    )
    return float(proc.stdout.strip().splitlines()[-1])
