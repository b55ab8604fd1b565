"""Feeding, bleeding and their counterfactual twins, and how they line up with solver accuracy."""

from collections import defaultdict

from cascadesynth import GenSpec, ReplaceOp, classify_bfcc, generate_task, solve_ensemble

a2b, b2c = ReplaceOp("a", "b"), ReplaceOp("b", "c")
words = ["a", "xa", "aax"]
print("a->b, b->c :", classify_bfcc([a2b, b2c], words).sorted())   # feeding
print("b->c, a->b :", classify_bfcc([b2c, a2b], words).sorted())   # counterfeeding
print("ab->x, b->y:", classify_bfcc([ReplaceOp("ab", "x"), ReplaceOp("b", "y")], ["ab"]).sorted())

# Stratify a generated corpus by interaction label.
spec = GenSpec(cascade_length_range=(2, 3), seed=5)
tally = defaultdict(lambda: [0, 0])
for i in range(80):
    task = generate_task(spec, i)
    solved = solve_ensemble(task).success
    for label in task.meta.bfcc or ("none",):
        tally[label][0] += solved
        tally[label][1] += 1

print()
for label, (ok, n) in sorted(tally.items()):
    print(f"{label:<16} {ok:>3}/{n:<3} solved  ({100 * ok / n:.0f}%)")
