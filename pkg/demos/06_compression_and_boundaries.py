"""Budget compression and word-boundary markers."""

from cascadesynth import GenSpec, Task, compression_budget, generate_task, solve_ensemble

# Tighter budgets push the solver towards general rules instead of per-example patches.
spec = GenSpec(n_examples=8, cascade_length_range=(2, 5), seed=4)
tasks = [generate_task(spec, i) for i in range(25)]
print("ratio  budget  acc%   mean length")
for ratio in (1, 2, 3, 5):
    budget = compression_budget(spec.n_examples, ratio)
    results = [solve_ensemble(t.with_budget(budget)) for t in tasks]
    acc = 100 * sum(r.success for r in results) / len(results)
    mean = sum(r.complexity for r in results) / len(results)
    print(f"{ratio:>5}  {budget:>6}  {acc:5.1f}  {mean:.2f}")

# Word-initial change b -> f: with '#' marking word edges a single op says it.
words = [("bada", "fada"), ("aba", "aba"), ("bob", "fob"), ("abba", "abba"), ("bib", "fib")]
plain = Task.from_pairs(words, max_programs=1)
marked = Task.from_pairs([(f"#{a}#", f"#{b}#") for a, b in words], max_programs=1)
print("\nwithout markers:", solve_ensemble(plain).reward, solve_ensemble(plain).program)
print("with markers:   ", solve_ensemble(marked).reward, solve_ensemble(marked).program)
