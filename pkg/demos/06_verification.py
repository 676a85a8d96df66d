"""Checking that a schedule is optimal, three independent ways.

1. A dynamic program over a grid of cumulative departures gives an
   energy no schedule can beat by more than the grid resolution.
2. The KKT certificate rebuilds Lagrange multipliers from the plan and
   checks that they are nonnegative and complementary.
3. The structure check labels every epoch off, on-off or on, and flags
   epochs that run in a way no optimal schedule would.
"""
from eesched import Instance, check_structure, heuristic1, kkt_certificate, oracle_energy, schedule_static, verify_schedule
from eesched.verify import oracle_tolerance

inst = Instance.build([0, 1, 2, 3.5], [(0, 4), (2, 3)], [(1, 3), (2, 1), (3, 3)], gain=1.5, rho=2)
sched, plan = schedule_static(inst)
print(f"solver energy  {sched.energy:.9f}")
print(f"oracle energy  {oracle_energy(inst):.9f}  (tolerance {oracle_tolerance(inst):.2e})")

m = kkt_certificate(inst, sched, plan)
print("multipliers", m.to_dict())
print("labels", check_structure(sched)[0])

h1 = heuristic1(inst)
labels, bad = check_structure(h1)
print(f"\nheuristic 1 labels {labels}, violating epochs {bad}")
rep = verify_schedule(inst, h1, oracle_grid=400)
print(f"heuristic 1 passes verification: {rep.passed} (gap to oracle {rep.oracle_gap:.4f} J)")
