"""Rule induction over train descriptions written as ground facts."""

from cascadesynth import SlrTask, induce_rule, parse_facts, normalize, render_rule
from cascadesynth.taskgen import planted_slr_task

east = """
has_car(t1, t1_c1). car_num(t1_c1, 1). car_color(t1_c1, red). car_len(t1_c1, long).
has_car(t1, t1_c2). car_num(t1_c2, 2). car_color(t1_c2, blue). car_len(t1_c2, short).
"""
west = """
has_car(t2, t2_c1). car_num(t2_c1, 1). car_color(t2_c1, red). car_len(t2_c1, short).
has_car(t2, t2_c2). car_num(t2_c2, 2). car_color(t2_c2, blue). car_len(t2_c2, long).
"""
print(normalize(parse_facts(east)))

task = SlrTask("toy", ((east, "eastbound"), (west, "westbound")))
res = induce_rule(task, top_k=3)
for rule, score in res.ranked:
    print(f"{score:.2f}  {render_rule(rule)}")

# Planted rules: the search stops at the first layer holding a perfect rule,
# so the answer is never longer than the rule that labelled the trains.
for seed in range(6):
    task, planted = planted_slr_task(seed, complexity=3)
    best, _ = induce_rule(task).best
    print(f"planted {planted.complexity} literals, found {best.complexity}: {render_rule(best)}")
