"""Longest-matching-block alignment and rewrite-candidate extraction.

The alignment is Ratcliff/Obershelp style: find the longest common block
(leftmost in the source, then leftmost in the target), recurse on both sides.
The gaps between matched blocks become :class:`EditRegion` s, and each region
is turned into ``replace`` candidates that respect the DSL length bounds.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal, Sequence

from .dsl import MAX_PATTERN_LEN, MAX_REPLACEMENT_LEN, ReplaceOp

CANDIDATE_CAP = 256

Kind = Literal["substitute", "insert", "delete"]


@dataclass(frozen=True)
class EditRegion:
    src_span: tuple[int, int]
    dst_span: tuple[int, int]
    kind: Kind


@dataclass(frozen=True)
class CandidateSet:
    ops: tuple[ReplaceOp, ...]
    origin: dict[ReplaceOp, int]

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)


def longest_match(a: str, b: str, alo: int, ahi: int, blo: int, bhi: int) -> tuple[int, int, int]:
    """Longest common block of ``a[alo:ahi]`` and ``b[blo:bhi]`` as ``(i, j, size)``.

    Ties go to the smallest ``i``, then the smallest ``j``.
    """
    best_i, best_j, best = alo, blo, 0
    prev: dict[int, int] = {}
    for i in range(alo, ahi):
        cur: dict[int, int] = {}
        ch = a[i]
        for j in range(blo, bhi):
            if b[j] == ch:
                k = prev.get(j - 1, 0) + 1
                cur[j] = k
                if k > best:
                    best_i, best_j, best = i - k + 1, j - k + 1, k
        prev = cur
    return best_i, best_j, best


@lru_cache(maxsize=1 << 16)
def matching_blocks(a: str, b: str) -> tuple[tuple[int, int, int], ...]:
    blocks = []
    stack = [(0, len(a), 0, len(b))]
    while stack:
        alo, ahi, blo, bhi = stack.pop()
        i, j, k = longest_match(a, b, alo, ahi, blo, bhi)
        if k:
            blocks.append((i, j, k))
            if alo < i and blo < j:
                stack.append((alo, i, blo, j))
            if i + k < ahi and j + k < bhi:
                stack.append((i + k, ahi, j + k, bhi))
    blocks.sort()
    return tuple(blocks)


def align(a: str, b: str) -> list[EditRegion]:
    regions = []
    i = j = 0
    for bi, bj, k in matching_blocks(a, b) + ((len(a), len(b), 0),):
        if i < bi or j < bj:
            if i < bi and j < bj:
                kind: Kind = "substitute"
            elif i < bi:
                kind = "delete"
            else:
                kind = "insert"
            regions.append(EditRegion((i, bi), (j, bj), kind))
        i, j = bi + k, bj + k
    return regions


def replay(a: str, b: str, regions: Sequence[EditRegion]) -> str:
    """Rebuild the target from ``a`` plus the target text of each region."""
    out = []
    pos = 0
    for r in regions:
        out.append(a[pos : r.src_span[0]])
        out.append(b[r.dst_span[0] : r.dst_span[1]])
        pos = r.src_span[1]
    out.append(a[pos:])
    return "".join(out)


def _chunks(s: str, n: int) -> list[str]:
    return [s[i : i + n] for i in range(0, len(s), n)]


def _make(pattern: str, replacement: str) -> ReplaceOp | None:
    if (
        1 <= len(pattern) <= MAX_PATTERN_LEN
        and len(replacement) <= MAX_REPLACEMENT_LEN
        and pattern != replacement
    ):
        return ReplaceOp(pattern, replacement)
    return None


@lru_cache(maxsize=1 << 16)
def pair_candidates(a: str, b: str, max_context: int) -> tuple[ReplaceOp, ...]:
    """All candidate ops proposed by one (current, target) pair, deduplicated."""
    if a == b:
        return ()
    blocks = matching_blocks(a, b)
    regions = align(a, b)
    # matched-run extents: how far identical context reaches left/right of a gap
    left_room: dict[int, int] = {}
    right_room: dict[int, int] = {}
    for bi, bj, k in blocks:
        left_room[bi + k] = k
        right_room[bi] = k

    found: dict[ReplaceOp, None] = {}

    def add(p: str, r: str) -> None:
        op = _make(p, r)
        if op is not None:
            found.setdefault(op, None)

    for reg in regions:
        (i1, i2), (j1, j2) = reg.src_span, reg.dst_span
        src, dst = a[i1:i2], b[j1:j2]
        # an insert needs at least one anchoring character
        ctx = max(max_context, 1) if reg.kind == "insert" else max_context
        lmax = min(ctx, left_room.get(i1, 0))
        rmax = min(ctx, right_room.get(i2, 0))
        if len(src) <= MAX_PATTERN_LEN and len(dst) <= MAX_REPLACEMENT_LEN:
            for l in range(lmax + 1):
                for r in range(rmax + 1):
                    if reg.kind == "insert" and l == 0 and r == 0:
                        continue
                    lc, rc = a[i1 - l : i1], a[i2 : i2 + r]
                    add(lc + src + rc, lc + dst + rc)
        else:
            _split_region(a, src, dst, i1, left_room.get(i1, 0), add)
        if reg.kind == "substitute" and len(src) == len(dst) and len(src) > 1:
            for x, y in zip(src, dst):
                if x != y:
                    add(x, y)
    return tuple(found)


def _split_region(a: str, src: str, dst: str, i1: int, left_room: int, add) -> None:
    """Chain of <=3-length ops that rewrites an oversized region piecewise."""
    src_parts = _chunks(src, MAX_PATTERN_LEN)
    dst_parts = _chunks(dst, MAX_REPLACEMENT_LEN)
    prev_tail = a[i1 - 1] if left_room else ""
    for k in range(max(len(src_parts), len(dst_parts))):
        s = src_parts[k] if k < len(src_parts) else ""
        d = dst_parts[k] if k < len(dst_parts) else ""
        if s:
            add(s, d)
        elif prev_tail:
            add(prev_tail, prev_tail + d)
        if d:
            prev_tail = d[-1]


def extract_candidates(
    pairs: Iterable[tuple[str, str]],
    max_context: int = 2,
    cap: int = CANDIDATE_CAP,
) -> CandidateSet:
    """Candidate ops from (current, target) pairs, ordered by how many pairs propose them.

    Ops whose pattern occurs in none of the current strings are dropped, since
    they could not change anything.
    """
    if max_context < 0:
        raise ValueError("max_context must be >= 0")
    pairs = list(pairs)
    counts: Counter[ReplaceOp] = Counter()
    for a, b in pairs:
        counts.update(pair_candidates(a, b, max_context))
    currents = [a for a, b in pairs]
    live = [op for op in counts if any(op.pattern in s for s in currents)]
    live.sort(key=lambda op: (-counts[op], op.pattern, op.replacement))
    live = live[:cap]
    return CandidateSet(tuple(live), {op: counts[op] for op in live})


@lru_cache(maxsize=1 << 16)
def _exact_fixes(current: str, target: str) -> tuple[ReplaceOp, ...]:
    return tuple(exact_fixes_uncached(current, target))


def exact_fixes(current: str, target: str) -> list[ReplaceOp]:
    return list(_exact_fixes(current, target))


def exact_fixes_uncached(current: str, target: str) -> list[ReplaceOp]:
    """Every single op that rewrites ``current`` into exactly ``target``.

    Any such op must have a pattern occurring in ``current``; for a fixed
    pattern the replacement is forced by the split structure, so checking each
    substring of length <= 3 is exhaustive.
    """
    if current == target:
        return []
    out = []
    seen = set()
    n = len(current)
    for length in range(1, MAX_PATTERN_LEN + 1):
        for start in range(n - length + 1):
            p = current[start : start + length]
            if p in seen:
                continue
            seen.add(p)
            r = solve_replacement(current, p, target)
            if r is not None and r != p:
                out.append(ReplaceOp(p, r))
    return out


def solve_replacement(current: str, pattern: str, target: str) -> str | None:
    """The replacement ``r`` with ``current.replace(pattern, r) == target``, if one exists."""
    parts = current.split(pattern)
    k = len(parts) - 1
    if k == 0:
        return current if current == target else None
    fixed = sum(len(p) for p in parts)
    extra = len(target) - fixed
    if extra < 0 or extra % k:
        return None
    rlen = extra // k
    if rlen > MAX_REPLACEMENT_LEN:
        return None
    start = len(parts[0])
    r = target[start : start + rlen]
    return r if r.join(parts) == target else None
