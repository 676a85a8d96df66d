"""Optimal schedule on a static channel.

Four units arrive at t = 0; three are due at t = 1 and the last one at
t = 2.  The solver pulls a string taut between the arrival and demand
curves, then raises any stretch slower than r_ee up to r_ee and turns
the radio off for the rest of it.
"""
import math

from eesched import Instance, cumulative_curves, departure_curve, first_change_r, schedule_static

inst = Instance.build([0, 1, 2], [(0, 4)], [(1, 3), (2, 1)], gain=1, rho=1)
sched, plan = schedule_static(inst)

print("first rate change:", first_change_r(inst))
for seg in plan:
    print(f"  segment up to epoch {seg.tau}: rate {seg.rate:g}, delivered {seg.delta:g}, bound by {seg.binding.value}")
print("rates   ", sched.rates.tolist())
print("on-times", sched.on_times.tolist())
print(f"energy {sched.energy:.6f} J   (e^3 + e = {math.e**3 + math.e:.6f})")

arr, dmin = cumulative_curves(inst)
print("\narrival curve ", arr)
print("demand curve  ", dmin)
print("departure     ", departure_curve(sched, inst.grid))

# A light load: one unit over two seconds.  The taut rate 0.5 is below
# r_ee = 1, so each epoch runs at r_ee for half its length.
light = Instance.build([0, 1, 2], [(0, 1)], [(2, 1)], gain=1, rho=1)
s, _ = schedule_static(light)
print(f"\nlight load: rates {s.rates.tolist()}, on {s.on_times.tolist()}, energy {s.energy:.6f} (e = {math.e:.6f})")
