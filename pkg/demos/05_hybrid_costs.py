"""Solver first, fallback generator second, and what the fallback costs."""

from decimal import Decimal

from cascadesynth import GenSpec, PricingConfig, compute_cost, generate_task, hybrid_solve, make_fallback

spec = GenSpec(cascade_length_range=(3, 5), seed=21)
tasks = [generate_task(spec, i) for i in range(40)]
pricing = PricingConfig(Decimal("0.039"), Decimal("0.190"), construction_cost=Decimal("2.00"))

# A weak solver makes the fallback do some work.
weak = ("greedy_residual",)
for fb in ("none", "noisy:0.5", "oracle"):
    for mode in ("best_of_k", "direct_feedback"):
        ledgers = [hybrid_solve(t, make_fallback(fb, seed=3), 4, mode, weak, pricing=pricing) for t in tasks]
        acc = 100 * sum(l.success for l in ledgers) / len(ledgers)
        tin = sum(l.input_tokens for l in ledgers)
        tout = sum(l.output_tokens for l in ledgers)
        cost = compute_cost(ledgers, pricing)
        print(f"{fb:<10} {mode:<16} acc {acc:5.1f}%  tokens {tin:>5}/{tout:<5} cost ${cost:.6f}")

# Solver-solved tasks never touch the fallback, so they cost nothing.
led = hybrid_solve(tasks[0], make_fallback("oracle"))
print("\nfull ensemble on", tasks[0].task_id, "-> fallback used:", led.fallback_used, "tokens:", led.input_tokens)

# Reference prices: a million tokens each way.
from cascadesynth.hybrid import token_cost
print("1M in + 1M out =", token_cost(1_000_000, 1_000_000, pricing))
print("with the one-time build:", compute_cost([led], pricing, include_construction=True))
