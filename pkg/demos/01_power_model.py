"""How circuit power changes the cheapest way to send a bit.

Without circuit power, slower is always cheaper: the Shannon power curve
is convex and passes through zero.  Once the radio burns ``rho`` watts
just by being on, the energy per unit of data is no longer monotone in
the rate, and there is a sweet spot ``r_ee`` below which it never pays
to transmit.
"""
import numpy as np

from eesched import SHANNON, CircuitParams, ee_rate, epoch_energy, normalize_circuit

g = 2.0
for rho in (0.0, 1.0, 3.0, 10.0):
    ee = ee_rate(g, rho)
    print(f"rho = {rho:4.1f} W   r_ee = {ee.r_ee:.4f}   energy per unit = {ee.unit_cost:.4f} J")

# The energy per unit as a function of rate, for rho = 3: it falls, bottoms
# out at r_ee, then climbs again.
rho = 3.0
ee = ee_rate(g, rho)
print("\nrate   J/unit")
for r in np.linspace(0.25, 4.0, 16):
    cost = (SHANNON.power(r, g) + rho) / r
    mark = "  <- r_ee" if abs(r - ee.r_ee) < 0.13 else ""
    print(f"{r:5.2f}  {cost:7.3f}{mark}")

# Sending phi units in a one-second epoch: below r_ee * L the cheapest plan
# runs at r_ee for part of the epoch, so the cost grows linearly.
print("\nphi   min energy in 1 s")
for phi in (0.5, 1.0, ee.r_ee, 3.0, 5.0):
    print(f"{phi:5.2f}  {epoch_energy(phi, g, 1.0, rho):8.3f}")

# RF efficiency and off-state power fold into an effective circuit term.
c = CircuitParams(rho=3.0, eta=0.5, beta=1.0)
print(f"\neffective rho for rho=3, eta=0.5, beta=1: {normalize_circuit(c)}")
