"""Generate a small benchmark, solve it with every strategy, then with the ensemble."""

import time

from cascadesynth import ALL, GenSpec, aggregate, generate_task, score_task, solve, solve_ensemble

spec = GenSpec(alphabet="abcde", cascade_length_range=(2, 4), seed=11)
tasks = [generate_task(spec, i) for i in range(60)]

t = tasks[0]
print("one task:", t.task_id)
for ex in t.examples:
    print(f"  {ex.input:>10} -> {ex.output}")
print("  planted:", t.ground_truth)

# Each strategy alone.
for sid in ALL:
    start = time.perf_counter()
    scores = [score_task(solve(task, sid).program, task) for task in tasks]
    rep = aggregate(scores)
    print(f"{sid:<20} acc {rep.accuracy:5.1f}%  reward {rep.mean_reward:.4f}  ({time.perf_counter() - start:.1f}s)")

# The ensemble keeps the best result per task, so it can only help.
results = [solve_ensemble(task) for task in tasks]
scores = [score_task(r.program, task) for r, task in zip(results, tasks)]
rep = aggregate(scores, group_key=lambda s: s.gt_complexity)
print()
print(rep.to_table("ensemble, by planted cascade length"))

# A shorter program than the planted one is still a valid answer.
shorter = [(r, task) for r, task in zip(results, tasks) if r.success and r.complexity < len(task.ground_truth)]
if shorter:
    r, task = shorter[0]
    print(f"\n{task.task_id}: planted {len(task.ground_truth)} ops, found {r.complexity}: {r.program}")
