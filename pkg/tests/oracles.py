"""Independent brute-force oracles used by the test suite.

None of these import the search code they check.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence


def all_strings(alphabet: Sequence[str], lo: int, hi: int):
    for n in range(lo, hi + 1):
        for t in itertools.product(alphabet, repeat=n):
            yield "".join(t)


def all_op_pairs(alphabet: Sequence[str]):
    """Every (pattern, replacement) pair, identity pairs included."""
    for p in all_strings(alphabet, 1, 3):
        for r in all_strings(alphabet, 0, 3):
            yield p, r


def brute_force_solvable(inputs, outputs, alphabet, max_len: int) -> bool:
    """Is there a cascade of at most ``max_len`` literal replaces mapping every input to its output?

    Exhaustive over every op of the DSL for all but the last position; the last
    op is checked for every pattern while its replacement is compared against
    every DSL string, so nothing is pruned on a guess.
    """
    inputs, outputs = tuple(inputs), tuple(outputs)
    if inputs == outputs:
        return True
    ops = [(p, r) for p, r in all_op_pairs(alphabet) if p != r]
    repls = list(all_strings(alphabet, 0, 3))
    frontier = {inputs}
    for depth in range(max_len):
        # last op: any pattern occurring in a mismatched string
        for cur in frontier:
            bad = [i for i in range(len(cur)) if cur[i] != outputs[i]]
            first = cur[bad[0]]
            pats = {first[a:b] for a in range(len(first)) for b in range(a + 1, min(a + 3, len(first)) + 1)}
            for p in pats:
                for r in repls:
                    if r == p:
                        continue
                    if all(s.replace(p, r) == t for s, t in zip(cur, outputs)):
                        return True
        if depth == max_len - 1:
            break
        nxt = set()
        for cur in frontier:
            for p, r in ops:
                if any(p in s for s in cur):
                    nxt.add(tuple(s.replace(p, r) for s in cur))
        frontier = nxt
    return False


def levenshtein_dp(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def binomial_count(L: int, k_max: int = 4) -> int:
    """Count subsets of size 1..k_max of L items by explicit enumeration."""
    return sum(1 for k in range(1, k_max + 1) for _ in itertools.combinations(range(L), k))


def eval_rule_bruteforce(rule, cars) -> bool:
    """Evaluate a train rule by trying every assignment of distinct cars.

    ``cars`` is a list of (position, {attr: value}) tuples.  Negated literals
    whose variable is bound by a positive literal test that car; otherwise they
    assert that no car at all has the property.
    """
    positive = [lit for lit in rule.literals if not lit.negated]
    bound = sorted({lit.var for lit in positive})
    def holds(car, lit):
        pos, props = car
        if lit.attr == "num":
            return pos == lit.value
        return props.get(lit.attr) == lit.value
    for assignment in itertools.permutations(cars, len(bound)):
        env = dict(zip(bound, assignment))
        if not all(holds(env[l.var], l) for l in positive):
            continue
        ok = True
        for lit in rule.literals:
            if not lit.negated:
                continue
            if lit.var in env:
                if holds(env[lit.var], lit):
                    ok = False
            elif any(holds(c, lit) for c in cars):
                ok = False
        if ok:
            return True
    return False


def comb_sum(L: int) -> int:
    return sum(math.comb(L, k) for k in range(1, 5))
