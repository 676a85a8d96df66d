"""Causal rescheduling: plan on the data known now, replan on each arrival.

At every arrival the transmitter treats the current instant as time zero,
merges what is left in its buffer with the new batch, and solves the
offline problem over the deadlines still pending.  Between arrivals it
follows that plan verbatim, off periods included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleUpdate, InstanceError
from .model import FEAS_ATOL, Instance, Schedule, build_instance_from_times
from .power import SHANNON, CircuitParams, PowerModel
from .taut_fading import schedule_fading
from .taut_static import schedule_static

__all__ = [
    "Batch",
    "OnlineConfig",
    "OnlineState",
    "online_step",
    "finish",
    "simulate_online",
    "stream_from_instance",
    "config_for",
]


@dataclass(frozen=True)
class Batch:
    """One arrival: ``amount`` units at ``time``, due as ``(t, amount)`` pieces."""

    time: float
    amount: float
    deadlines: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class OnlineConfig:
    """Channel seen by the online transmitter.

    ``breaks``/``gains`` describe a piecewise-constant power gain
    (``gains[k]`` on ``[breaks[k], breaks[k+1])``); a lone ``gain`` means a
    static channel.  With ``forecast`` the planner knows the future gains
    and uses the fading solver; otherwise it plans for the gain in force at
    the replanning instant.  Energy is always charged with the true gains.
    """

    circuit: CircuitParams
    gain: float = 1.0
    breaks: tuple[float, ...] | None = None
    gains: tuple[float, ...] | None = None
    forecast: bool = False
    model: PowerModel = SHANNON

    def gain_at(self, t: float) -> float:
        if self.gains is None:
            return self.gain
        k = int(np.searchsorted(self.breaks, t, side="right")) - 1
        return float(self.gains[max(k, 0)])


@dataclass
class OnlineState:
    """Transmitter state between replanning instants.

    ``pending`` holds absolute ``(deadline time, amount still owed)``
    pairs in time order; ``plan_start`` and ``plan_bounds`` place the active
    schedule on the absolute time axis.
    """

    now: float = 0.0
    buffer: float = 0.0
    pending: list[tuple[float, float]] = field(default_factory=list)
    schedule: Schedule | None = None
    plan_start: float = 0.0
    plan_bounds: np.ndarray | None = None
    energy_so_far: float = 0.0
    log: list[dict] = field(default_factory=list)


def _run(state: OnlineState, until: float, cfg: OnlineConfig) -> float:
    """Execute the active plan over ``[state.now, until]``; return data sent."""
    s = state.schedule
    if s is None or until <= state.now:
        return 0.0
    sent = 0.0
    energy = []
    b = state.plan_bounds
    for n in range(s.n_epochs):
        r, l = float(s.rates[n]), float(s.on_times[n])
        if r <= 0 or l <= 0:
            continue
        a = max(b[n], state.now)
        z = min(b[n] + l, until)
        if z <= a:
            continue
        dt = z - a
        g = cfg.gain_at(0.5 * (a + z))
        sent += r * dt
        energy.append((float(cfg.model.power(r, g)) + state.schedule.rho_eff) * dt)
    state.energy_so_far += math.fsum(energy)
    return sent


def _settle(state: OnlineState, sent: float, until: float, event_index: int | None):
    """Book ``sent`` against pending deadlines, earliest first."""
    state.buffer = max(0.0, state.buffer - sent)
    left = sent
    pend = []
    for t, d in state.pending:
        take = min(d, left)
        left -= take
        pend.append((t, d - take))
    scale = max(1.0, sum(d for _, d in state.pending))
    kept = []
    for t, d in pend:
        if t <= until * (1 + 1e-12):
            if d > FEAS_ATOL * scale:
                raise InfeasibleUpdate(
                    f"deadline at t={t:g} missed by {d:.3g} units", event_index
                )
            continue
        if d > FEAS_ATOL * scale:
            kept.append((t, d))
    state.pending = kept
    if not kept:
        state.buffer = 0.0


def _replan(state: OnlineState, cfg: OnlineConfig, event_index: int | None):
    if not state.pending:
        state.schedule, state.plan_bounds = None, None
        return
    t0 = state.now
    times = [t - t0 for t, _ in state.pending]
    amounts = [d for _, d in state.pending]
    if times[0] <= 0:
        raise InfeasibleUpdate(f"deadline at t={state.pending[0][0]:g} has no time left", event_index)
    horizon = times[-1]
    amounts[-1] += state.buffer - sum(amounts)  # absorb rounding drift
    kw = {}
    if cfg.gains is not None:
        br = np.asarray(cfg.breaks, dtype=float) - t0
        k0 = max(int(np.searchsorted(br, 0.0, side="right")) - 1, 0)
        br = np.concatenate([[0.0], br[k0 + 1:]])
        kw = dict(channel_breaks=br.tolist(), channel_gains=list(cfg.gains[k0:]))
    inst = build_instance_from_times(
        [0.0], [state.buffer], times, amounts, horizon, cfg.circuit,
        gain=cfg.gain_at(t0), **kw,
    )
    if cfg.forecast and not inst.is_static:
        sched, _ = schedule_fading(inst, cfg.model)
    else:
        sched, _ = schedule_static(inst, gain=cfg.gain_at(t0), model=cfg.model)
    state.schedule = sched
    state.plan_start = t0
    state.plan_bounds = t0 + inst.grid.times


def online_step(state: OnlineState, batch: Batch, cfg: OnlineConfig,
                event_index: int | None = None) -> OnlineState:
    """Advance to ``batch.time``, admit the batch and replan.

    Raises
    ------
    InfeasibleUpdate
        A pending deadline is missed, or a new deadline leaves no time.
    """
    if batch.time < state.now:
        raise InfeasibleUpdate(f"arrival at t={batch.time:g} precedes now={state.now:g}", event_index)
    total_due = sum(d for _, d in batch.deadlines)
    if abs(total_due - batch.amount) > FEAS_ATOL * max(1.0, batch.amount):
        raise InstanceError(f"batch at t={batch.time:g}: deadlines sum to {total_due}, not {batch.amount}")
    sent = _run(state, batch.time, cfg)
    _settle(state, sent, batch.time, event_index)
    state.now = batch.time
    for t, d in batch.deadlines:
        if d > 0 and t <= batch.time:
            raise InfeasibleUpdate(f"new deadline at t={t:g} has no time left", event_index)
    merged: dict[float, float] = dict()
    for t, d in list(state.pending) + [(t, d) for t, d in batch.deadlines if d > 0]:
        merged[t] = merged.get(t, 0.0) + d
    state.pending = sorted(merged.items())
    state.buffer += batch.amount
    _replan(state, cfg, event_index)
    state.log.append(_log_row(state, "arrival"))
    return state


def finish(state: OnlineState, cfg: OnlineConfig) -> OnlineState:
    """Run the last plan to completion."""
    if state.pending:
        end = state.pending[-1][0]
        sent = _run(state, end, cfg)
        _settle(state, sent, end, None)
        state.now = end
    state.log.append(_log_row(state, "complete"))
    return state


def _log_row(state: OnlineState, event: str) -> dict:
    return {
        "time": state.now,
        "event": event,
        "buffer": state.buffer,
        "energy_so_far": state.energy_so_far,
        "plan_rates": [] if state.schedule is None else state.schedule.rates.tolist(),
    }


def simulate_online(stream: Iterable[Batch], cfg: OnlineConfig) -> tuple[float, list[dict]]:
    """Fold :func:`online_step` over a time-ordered stream.

    Returns the total energy (solver units, as ``Schedule.energy``) and the
    per-event log.
    """
    state = OnlineState()
    for idx, batch in enumerate(stream):
        online_step(state, batch, cfg, idx)
    finish(state, cfg)
    return state.energy_so_far, state.log


def stream_from_instance(instance: Instance) -> list[Batch]:
    """Split an offline instance into batches, oldest data due first.

    Each deadline's demand is charged to the earliest data not yet owed
    elsewhere, so every batch carries the deadlines its own units meet.
    """
    t = instance.grid.times
    batches = []
    owed = [(float(t[k]), d) for k, d in instance.deadlines.events if d > 0]
    j, left = 0, owed[0][1] if owed else 0.0
    for k, a in instance.arrivals.events:
        if a <= 0:
            continue
        need, parts = a, []
        while need > FEAS_ATOL * max(1.0, a) and j < len(owed):
            take = min(need, left)
            parts.append((owed[j][0], take))
            need -= take
            left -= take
            if left <= FEAS_ATOL * max(1.0, owed[j][1]):
                j += 1
                left = owed[j][1] if j < len(owed) else 0.0
        if parts:
            # fold rounding into the last piece so the batch balances exactly
            tt, dd = parts[-1]
            parts[-1] = (tt, dd + (a - sum(p for _, p in parts)))
        batches.append(Batch(float(t[k]), a, _merge(parts)))
    return batches


def _merge(parts: Sequence[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    out: dict[float, float] = {}
    for tt, dd in parts:
        out[tt] = out.get(tt, 0.0) + dd
    return tuple(sorted(out.items()))


def config_for(instance: Instance, *, forecast: bool = False, model: PowerModel = SHANNON) -> OnlineConfig:
    """Online configuration matching an offline instance's channel."""
    if instance.is_static:
        return OnlineConfig(instance.circuit, gain=instance.channel.static_gain, model=model)
    return OnlineConfig(
        instance.circuit,
        breaks=tuple(instance.grid.times[:-1].tolist()),
        gains=tuple(instance.gains.tolist()),
        forecast=forecast,
        model=model,
    )
