"""What the optimum buys over simpler policies.

* heuristic 1 clears each batch at a constant rate by its next event;
* heuristic 2 plans as if the circuit cost nothing and keeps the radio on;
* heuristic 3 plans with the optimal method but for the average gain.
"""
import numpy as np

from eesched import heuristic1, heuristic2, heuristic3, schedule_fading, schedule_static
from eesched.bench import TrialConfig, generate_instance

for T in (60, 1920):
    inst = generate_instance(TrialConfig(T=T), np.random.default_rng(11))
    opt = schedule_static(inst)[0].energy
    print(f"static channel, T = {T}: optimum {opt:.4g} J")
    for h in (heuristic1, heuristic2):
        print(f"  {h.__name__}: {h(inst).energy / opt:.4g} x optimum")

inst = generate_instance(TrialConfig(T=240, channel="rayleigh"), np.random.default_rng(5))
opt = schedule_fading(inst)[0].energy
print(f"\nRayleigh channel, T = 240: optimum {opt:.4g} J")
for h in (heuristic1, heuristic2, heuristic3):
    print(f"  {h.__name__}: {h(inst).energy / opt:.4g} x optimum")
