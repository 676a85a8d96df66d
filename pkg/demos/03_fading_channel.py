"""Water levels on a block-fading channel.

With a different gain in every epoch the schedule is described by a
water level ``w`` per segment instead of a rate.  An epoch transmits at
``ln(g w)`` when ``w`` clears its own threshold ``w_ee(g)``, idles when
it does not, and runs on-off at ``r_ee`` exactly on the threshold.
"""
import math

import numpy as np

from eesched import Instance, first_change_w, schedule_fading, solve_water_level

# Two units over two epochs; the second epoch has a far better channel.
inst = Instance.build([0, 1, 2], [(0, 2)], [(2, 2)], gains=[1, math.e**2], rho=1)
s, plan = schedule_fading(inst)
print("water level:", solve_water_level([(1, 1), (math.e**2, 1)], 2.0, 1.0))
print("rates", s.rates.round(6).tolist(), "on", s.on_times.round(6).tolist())
print(f"energy {s.energy:.6f} J, all of it in the good epoch")

# An early deadline forces data through the poor epoch first.
tight = Instance.build([0, 1, 2], [(0, 3)], [(1, 1), (2, 2)], gains=[1, math.e**2], rho=1)
print("\nfirst level change:", first_change_w(tight))
s, plan = schedule_fading(tight)
for seg in plan:
    print(f"  up to epoch {seg.tau}: level {seg.level:.4f}, bound by {seg.binding.value}")

# A random Rayleigh trace over 20 one-second epochs.
rng = np.random.default_rng(4)
gains = rng.exponential(2.0, 20)
inst = Instance.build(list(range(21)), [(0, 6), (8, 6)], [(10, 5), (20, 7)], gains=gains.tolist(), rho=3)
s, plan = schedule_fading(inst)
print("\n g     rate    on")
for g, r, l in zip(gains, s.rates, s.on_times):
    print(f"{g:5.2f} {r:6.3f} {l:5.2f}")
print(f"energy {s.energy:.4f} J over {len(plan)} level segments")
