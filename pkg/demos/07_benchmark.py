"""A small version of the randomized energy comparison.

Each trial draws one instance and runs every scheme on it, so ratios are
paired.  Trials are seeded from (seed, T, trial index) and reproduce
exactly whatever the number of worker processes.
"""
import json

from eesched.bench import TrialConfig, run_energy_comparison, run_scaling, summarize

rows = []
for T in (60, 240, 960):
    rows += run_energy_comparison(TrialConfig(T=T, trials=10, seed=1))
print(json.dumps(summarize(rows), indent=1))

print("\nsolve time against event count")
for r in run_scaling((16, 32, 64, 128), reps=5):
    print(f"  {r['events']:4d} events: {r['median_ms']:.3f} ms")
