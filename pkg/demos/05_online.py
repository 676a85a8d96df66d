"""Scheduling without knowing the future.

The online transmitter sees each batch only when it arrives.  It then
solves the offline problem for everything in its buffer and follows that
plan until the next arrival.
"""
from eesched import Batch, Instance, OnlineConfig, OnlineState, online_step, schedule_static, simulate_online, stream_from_instance
from eesched.online import config_for, finish
from eesched.power import CircuitParams

cfg = OnlineConfig(CircuitParams(rho=1.0), gain=1.0)
state = OnlineState()
for batch in (Batch(0.0, 1.0, ((2.0, 1.0),)), Batch(1.0, 1.0, ((2.0, 1.0),))):
    online_step(state, batch, cfg)
    print(f"t={state.now}: buffer {state.buffer:g}, plan rates {state.schedule.rates.tolist()}")
finish(state, cfg)
print(f"online energy {state.energy_so_far:.6f} J")

joint = Instance.build([0, 1, 2], [(0, 1), (1, 1)], [(2, 2)], gain=1, rho=1)
print(f"offline optimum {schedule_static(joint)[0].energy:.6f} J")

# Replaying an offline instance as a stream.
inst = Instance.build([0, 2, 3, 6], [(0, 3), (1, 4), (2, 2)], [(2, 5), (3, 4)], gain=2, rho=3)
energy, log = simulate_online(stream_from_instance(inst), config_for(inst))
for row in log:
    print(f"  t={row['time']:g} {row['event']:8s} buffer {row['buffer']:g} energy {row['energy_so_far']:.4f}")
print(f"online {energy:.4f} J vs offline {schedule_static(inst)[0].energy:.4f} J")
