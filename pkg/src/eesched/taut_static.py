"""Optimal offline schedule over a time-invariant channel.

A forward scan over the merged arrival/deadline events finds the first
instant where no single rate satisfies every constraint seen so far,
commits that rate up to the binding constraint, and restarts there.

Candidate rates are compared before clipping to r_ee.  Clipped candidates
all tie at r_ee, and breaking that tie by the unclipped rate is what keeps
every inner constraint of an on-off run satisfied: each epoch of the run
then sends ``r L`` at r_ee over an on-time ``r L / r_ee``.  Adjacent runs
that clip to the same rate are merged in the reported plan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InstanceError
from .model import (
    ChannelTrace,
    Instance,
    Schedule,
    check_feasible,
    make_schedule,
    schedule_energy,
)
from .power import SHANNON, TIE_RTOL, EeRate, PowerModel, ee_rate

__all__ = [
    "Binding",
    "Segment",
    "SegmentPlan",
    "first_change_r",
    "schedule_static",
    "ideal_schedule",
    "clip_from_ideal",
    "merge_equal",
]


class Binding(str, Enum):
    CAUSALITY = "causality"
    DEADLINE = "deadline"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class Segment:
    """One constant-rate run ending at epoch ``tau``.

    ``delta`` is the cumulative departure (from t = 0) at the end of the run.
    """

    tau: int
    rate: float
    delta: float
    binding: Binding


SegmentPlan = tuple  # tuple[Segment, ...]


def _scan(tcum, offset, base, up, pa, lo, pd, last):
    """One FirstChange pass starting at index ``offset`` with ``base`` sent.

    ``up``/``lo`` are lists of ``(index, cumulative value)`` and ``pa``/``pd``
    the first entries with index > offset.  Equal indices: arrivals first.
    Candidates are compared unclipped; returns ``(tau, rate, delta,
    binding)`` with ``delta`` cumulative.
    """
    t0 = tcum[offset]
    r_plus, r_minus = math.inf, 0.0
    tau_p = tau_m = offset
    d_p = d_m = base
    i, j = pa, pd
    nu, nl = len(up), len(lo)
    while i < nu or j < nl:
        if i < nu and (j >= nl or up[i][0] <= lo[j][0]):
            k, v = up[i]
            c = (v - base) / (tcum[k] - t0)
            if c <= r_plus:
                tau_p, r_plus, d_p = k, c, v
            i += 1
        else:
            k, v = lo[j]
            c = (v - base) / (tcum[k] - t0)
            if c >= r_minus:
                tau_m, r_minus, d_m = k, c, v
            j += 1
        if r_minus > r_plus and tau_m < tau_p:
            return tau_m, r_minus, d_m, Binding.DEADLINE
        if r_minus >= r_plus and tau_m >= tau_p:
            kind = Binding.TERMINAL if tau_p == last else Binding.CAUSALITY
            return tau_p, r_plus, d_p, kind
    # only reachable through rounding in the terminal totals
    total = lo[-1][1]
    return last, max(0.0, (total - base) / (tcum[last] - t0)), total, Binding.TERMINAL


def _tauten(tcum: Sequence[float], up, lo) -> list[Segment]:
    """Taut-string decomposition of a cumulative-constraint system.

    ``tcum[k]`` is the elapsed time at index k (``tcum[0] = 0``); the last
    entries of ``up`` and ``lo`` must both sit at the final index with the
    same total.  Rates are unclipped.
    """
    last = len(tcum) - 1
    offset, base, pa, pd = 0, 0.0, 0, 0
    segs = []
    while offset < last:
        tau, rate, delta, kind = _scan(tcum, offset, base, up, pa, lo, pd, last)
        segs.append(Segment(tau, rate, delta, kind))
        offset, base = tau, delta
        while pa < len(up) and up[pa][0] <= tau:
            pa += 1
        while pd < len(lo) and lo[pd][0] <= tau:
            pd += 1
    return segs


def merge_equal(segments: Sequence, key: str = "rate", rtol: float = TIE_RTOL) -> tuple:
    """Fuse neighbouring runs whose rate (or level) agrees within ``rtol``."""
    out: list = []
    for s in segments:
        if out:
            a, b = getattr(out[-1], key), getattr(s, key)
            if abs(a - b) <= rtol * max(abs(a), abs(b)):
                out[-1] = s
                continue
        out.append(s)
    return tuple(out)


def _static_gain(instance: Instance, gain: float | None) -> float:
    if gain is not None:
        return float(gain)
    if not instance.is_static:
        raise InstanceError("time-varying channel: use schedule_fading or pass gain=")
    return instance.channel.static_gain


def first_change_r(
    instance: Instance,
    *,
    gain: float | None = None,
    rho_eff: float | None = None,
    model: PowerModel = SHANNON,
) -> tuple[int, float, float]:
    """First rate-changing epoch ``tau``, the rate before it, and the data
    ``delta`` delivered by then."""
    check_feasible(instance)
    g = _static_gain(instance, gain)
    rho = instance.rho_eff if rho_eff is None else rho_eff
    floor = ee_rate(g, rho, model).r_ee
    plan = _clipped_plan(instance, floor)
    first = plan[0]
    return first.tau, first.rate, first.delta


def schedule_static(
    instance: Instance,
    *,
    gain: float | None = None,
    rho_eff: float | None = None,
    model: PowerModel = SHANNON,
) -> tuple[Schedule, SegmentPlan]:
    """Optimal schedule for a static channel and its rate-change plan.

    ``gain`` and ``rho_eff`` override the instance's channel and circuit
    (used by the heuristics that plan under a mismatched assumption).
    """
    check_feasible(instance)
    g = _static_gain(instance, gain)
    rho = instance.rho_eff if rho_eff is None else rho_eff
    ee = ee_rate(g, rho, model)
    r_ee = ee.r_ee
    L = instance.lengths
    raw = _tauten(instance.grid.times.tolist(), instance.causal_constraints(),
                  instance.deadline_constraints())
    rates = np.zeros(instance.n_epochs)
    on = np.zeros(instance.n_epochs)
    start = 0
    for seg in raw:
        sl = slice(start, seg.tau)
        if seg.rate > r_ee:
            rates[sl] = seg.rate
            on[sl] = L[sl]
        elif seg.rate > 0:
            # on-off at r_ee, sending what the unclipped string would
            rates[sl] = r_ee
            on[sl] = L[sl] * (seg.rate / r_ee)
        start = seg.tau
    sched = make_schedule(instance.with_channel(_static_channel(instance, g)), rates, on,
                          rho_eff=rho, model=model)
    return sched, _clip_plan(raw, r_ee)


def _clip_plan(raw, r_ee: float) -> SegmentPlan:
    return merge_equal([Segment(s.tau, max(s.rate, r_ee), s.delta, s.binding) for s in raw])


def _clipped_plan(instance: Instance, r_ee: float) -> SegmentPlan:
    raw = _tauten(instance.grid.times.tolist(), instance.causal_constraints(),
                  instance.deadline_constraints())
    return _clip_plan(raw, r_ee)


def _static_channel(instance: Instance, g: float) -> ChannelTrace:
    if instance.is_static and instance.channel.static_gain == g:
        return instance.channel
    return ChannelTrace(static_gain=g)


def ideal_schedule(instance: Instance, *, gain: float | None = None,
                   model: PowerModel = SHANNON) -> tuple[Schedule, SegmentPlan]:
    """Always-on taut string for an ideal (zero) circuit power."""
    return schedule_static(instance, gain=gain, rho_eff=0.0, model=model)


def clip_from_ideal(ideal: Schedule, ee: EeRate, model: PowerModel = SHANNON) -> Schedule:
    """Turn an always-on ideal schedule into the circuit-aware optimum.

    Epochs whose ideal rate falls below r_ee send the same amount at r_ee
    over a shortened on-period; the rest are unchanged.
    """
    r_t = np.asarray(ideal.rates, dtype=float)
    L = np.asarray(ideal.lengths, dtype=float)
    low = r_t < ee.r_ee
    rates = np.where(low, ee.r_ee, r_t)
    with np.errstate(divide="ignore", invalid="ignore"):
        on = np.where(low, np.where(ee.r_ee > 0, r_t * L / ee.r_ee, 0.0), L)
    off = r_t <= 0
    rates = np.where(off, 0.0, rates)
    on = np.where(off, 0.0, on)
    gains = np.full(len(r_t), ee.gain)
    energy = schedule_energy(rates, on, gains, ee.rho_eff, model)
    return Schedule(rates, on, L, gains, ee.rho_eff, energy)
