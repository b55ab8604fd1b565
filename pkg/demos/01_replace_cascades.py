"""A first look at replace cascades: semantics, ordering and how big the search space gets."""

from cascadesynth import ReplaceOp, apply_cascade, cascade_search_space, count_programs, trace_cascade

# One op is a plain replace-all, scanning left to right without overlaps.
print(ReplaceOp("ab", "x")("abab"))   # xx
print(ReplaceOp("aa", "b")("aaa"))    # ba, the scan does not back up
print(ReplaceOp("a", "aa")("aa"))     # aaaa, inserted text is not rescanned

# Cascades run op after op, so order matters.
feed = (ReplaceOp("a", "b"), ReplaceOp("b", "c"))
print(apply_cascade(feed, "a"), apply_cascade(feed[::-1], "a"))  # c b

# The trace shows every intermediate string.
for step, s in enumerate(trace_cascade(feed, "banana")):
    print(f"  after {step} op(s): {s}")

# Counting: patterns of length 1..3, replacements of length 0..3.
for v in (13, 17, 52):
    print(f"V={v:>2}: {count_programs(v):>15,} single ops")

# Cascades of up to five ops over 13 symbols.
for n in range(1, 6):
    print(f"  length <= {n}: {cascade_search_space(13, n):.2e}")
