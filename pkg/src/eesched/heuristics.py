"""Baseline policies used for energy comparisons.

None of these is optimal; they plan under a simplified view of the
problem and are then charged the true energy.
"""

from __future__ import annotations

import numpy as np

from .model import Instance, Schedule, check_feasible, make_schedule
from .power import SHANNON, PowerModel
from .taut_static import schedule_static

__all__ = ["heuristic1", "heuristic2", "heuristic3"]


def _mean_gain(instance: Instance) -> float:
    # time-weighted, so it matches the per-second trace average
    if instance.is_static:
        return instance.channel.static_gain
    L = instance.lengths
    return float(np.dot(instance.gains, L) / L.sum())


def heuristic1(instance: Instance, model: PowerModel = SHANNON) -> Schedule:
    """Always-on, event by event: make the next event's constraint tight.

    Heading into a deadline instant the rate covers the cumulative demand
    due there; heading into an arrival instant it drains everything that
    has arrived so far.  An instant carrying both is treated as an arrival
    (draining also covers the demand, since demand must have arrived
    strictly earlier).
    """
    check_feasible(instance)
    N = instance.n_epochs
    times = instance.grid.times
    arr_cum = {}
    cum = 0.0
    for k, a in instance.arrivals.events:
        cum += a
        arr_cum[k] = cum
    arrival_at = {k for k, a in instance.arrivals.events if a > 0 and 0 < k < N}
    demand_at = dict(instance.deadline_constraints())
    events = sorted(arrival_at | set(demand_at))

    rates = np.zeros(N)
    sent, prev = 0.0, 0
    arrived = arr_cum.get(0, 0.0)
    for k in events:
        if k in arrival_at:
            target = arrived
        else:
            target = demand_at[k]
        r = max(0.0, (target - sent) / (times[k] - times[prev]))
        rates[prev:k] = r
        sent += r * (times[k] - times[prev])
        if k in arr_cum:
            arrived = arr_cum[k]
        prev = k
    on = np.where(rates > 0, instance.lengths, 0.0)
    return make_schedule(instance, rates, on, model=model)


def heuristic2(instance: Instance, model: PowerModel = SHANNON) -> Schedule:
    """Taut string for a zero-circuit-power transmitter, charged the real rho.

    With no circuit cost the planner never idles, so every epoch carrying
    data stays on for its whole length.  The zero-cost taut string does not
    depend on the gain, which lets the same plan run on a fading channel.
    """
    g = _mean_gain(instance)
    ideal, _ = schedule_static(instance, gain=g, rho_eff=0.0, model=model)
    on = np.where(ideal.rates > 0, instance.lengths, 0.0)
    return make_schedule(instance, ideal.rates, on, model=model)


def heuristic3(instance: Instance, model: PowerModel = SHANNON) -> Schedule:
    """Static-channel optimum for the mean gain, charged the true gains."""
    g = _mean_gain(instance)
    planned, _ = schedule_static(instance, gain=g, model=model)
    return make_schedule(instance, planned.rates, planned.on_times, model=model)
