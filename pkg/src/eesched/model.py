"""Problem instances: epoch grid, arrival/deadline processes, channel trace.

Epoch indices are the primary keys.  Epoch ``n`` (1-based) spans
``(t_{n-1}, t_n]``; an arrival at index ``alpha`` happens at ``t_alpha`` and
can be served from epoch ``alpha + 1`` on, a deadline at index ``delta``
must be met by the end of epoch ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleDemand, InstanceError, TotalsMismatch
from .power import SHANNON, CircuitParams, PowerModel

__all__ = [
    "EpochGrid",
    "ArrivalProcess",
    "DeadlineProcess",
    "ChannelTrace",
    "Instance",
    "Schedule",
    "FEAS_ATOL",
    "check_feasible",
    "is_feasible",
    "cumulative_curves",
    "departure_curve",
    "constraint_slacks",
    "is_schedule_feasible",
    "schedule_energy",
    "make_schedule",
    "build_instance_from_times",
    "step_value",
    "curve_value",
]

# absolute tolerance for C1/C2 checks on produced schedules
FEAS_ATOL = 1e-9


@dataclass(frozen=True)
class EpochGrid:
    boundaries: tuple[float, ...]

    def __post_init__(self):
        b = tuple(float(x) for x in self.boundaries)
        object.__setattr__(self, "boundaries", b)
        if len(b) < 2:
            raise InstanceError("epoch grid needs at least two boundaries (N >= 1)")
        if b[0] != 0.0:
            raise InstanceError(f"grid must start at t_0 = 0, got {b[0]}")
        if not all(math.isfinite(x) for x in b):
            raise InstanceError("grid boundaries must be finite")
        if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
            raise InstanceError("grid boundaries must be strictly increasing")

    @property
    def n_epochs(self) -> int:
        return len(self.boundaries) - 1

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self.boundaries)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.times)

    @property
    def horizon(self) -> float:
        return self.boundaries[-1]


def _events(events: Iterable) -> tuple[tuple[int, float], ...]:
    out = []
    for ev in events:
        if isinstance(ev, dict):
            epoch, amount = ev["epoch"], ev["amount"]
        else:
            epoch, amount = ev
        if int(epoch) != epoch:
            raise InstanceError(f"epoch index must be an integer, got {epoch!r}")
        out.append((int(epoch), float(amount)))
    return tuple(out)


@dataclass(frozen=True)
class ArrivalProcess:
    """Arrival events ``(alpha_i, a_i)``; the terminal ``(N, 0)`` is implied."""

    events: tuple[tuple[int, float], ...]

    def __post_init__(self):
        ev = _events(self.events)
        object.__setattr__(self, "events", ev)
        idx = [e for e, _ in ev]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InstanceError("arrival epochs must be strictly increasing")
        if idx and idx[0] < 0:
            raise InstanceError("arrival epochs must be >= 0")
        if any(not (a >= 0 and math.isfinite(a)) for _, a in ev):
            raise InstanceError("arrival amounts must be finite and >= 0")

    @property
    def total(self) -> float:
        return math.fsum(a for _, a in self.events)


@dataclass(frozen=True)
class DeadlineProcess:
    events: tuple[tuple[int, float], ...]

    def __post_init__(self):
        ev = _events(self.events)
        object.__setattr__(self, "events", ev)
        idx = [e for e, _ in ev]
        if not ev:
            raise InstanceError("at least one deadline is required")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InstanceError("deadline epochs must be strictly increasing")
        if idx[0] <= 0:
            raise InstanceError("deadline epochs must be >= 1")
        if any(not (d > 0 and math.isfinite(d)) for _, d in ev):
            raise InstanceError("deadline amounts must be finite and > 0")

    @property
    def total(self) -> float:
        return math.fsum(d for _, d in self.events)


@dataclass(frozen=True)
class ChannelTrace:
    """A single static power gain or one gain per epoch."""

    static_gain: float | None = None
    gains: tuple[float, ...] | None = None

    def __post_init__(self):
        if (self.static_gain is None) == (self.gains is None):
            raise InstanceError("channel needs exactly one of static_gain or gains")
        if self.gains is not None:
            g = tuple(float(x) for x in self.gains)
            object.__setattr__(self, "gains", g)
            vals = g
        else:
            object.__setattr__(self, "static_gain", float(self.static_gain))
            vals = (self.static_gain,)
        if not vals or any(not (x > 0 and math.isfinite(x)) for x in vals):
            raise InstanceError("channel gains must be finite and > 0")

    @property
    def is_static(self) -> bool:
        return self.static_gain is not None

    def epoch_gains(self, n_epochs: int) -> np.ndarray:
        if self.static_gain is not None:
            return np.full(n_epochs, self.static_gain)
        if len(self.gains) != n_epochs:
            raise InstanceError(
                f"channel has {len(self.gains)} gains for {n_epochs} epochs"
            )
        return np.asarray(self.gains)

    def mean_gain(self) -> float:
        if self.static_gain is not None:
            return self.static_gain
        return float(np.mean(self.gains))


@dataclass(frozen=True)
class Instance:
    grid: EpochGrid
    arrivals: ArrivalProcess
    deadlines: DeadlineProcess
    channel: ChannelTrace
    circuit: CircuitParams = field(default_factory=lambda: CircuitParams(rho=0.0))

    def __post_init__(self):
        N = self.grid.n_epochs
        ev = list(self.arrivals.events)
        if not ev or ev[0][0] != 0:
            ev.insert(0, (0, 0.0))
        if ev[-1][0] > N:
            raise InstanceError(f"arrival epoch {ev[-1][0]} beyond N={N}")
        if ev[-1][0] == N:
            if ev[-1][1] != 0:
                raise InstanceError("no data may arrive at t_N (a_A must be 0)")
        else:
            ev.append((N, 0.0))
        object.__setattr__(self, "arrivals", ArrivalProcess(tuple(ev)))
        if self.deadlines.events[-1][0] != N:
            raise InstanceError(
                f"last deadline must sit at epoch N={N}, got {self.deadlines.events[-1][0]}"
            )
        self.channel.epoch_gains(N)  # validates length

    @classmethod
    def build(
        cls,
        boundaries: Sequence[float],
        arrivals: Iterable,
        deadlines: Iterable,
        *,
        gain: float | None = None,
        gains: Sequence[float] | None = None,
        rho: float = 0.0,
        eta: float = 1.0,
        beta: float = 0.0,
    ) -> "Instance":
        if gain is None and gains is None:
            gain = 1.0
        return cls(
            EpochGrid(tuple(boundaries)),
            ArrivalProcess(tuple(arrivals)),
            DeadlineProcess(tuple(deadlines)),
            ChannelTrace(static_gain=gain, gains=None if gains is None else tuple(gains)),
            CircuitParams(rho=rho, eta=eta, beta=beta),
        )

    # -- derived quantities ---------------------------------------------

    @property
    def n_epochs(self) -> int:
        return self.grid.n_epochs

    @property
    def lengths(self) -> np.ndarray:
        return self.grid.lengths

    @property
    def horizon(self) -> float:
        return self.grid.horizon

    @property
    def gains(self) -> np.ndarray:
        return self.channel.epoch_gains(self.n_epochs)

    @property
    def is_static(self) -> bool:
        return self.channel.is_static

    @property
    def total(self) -> float:
        return self.deadlines.total

    @property
    def rho_eff(self) -> float:
        return self.circuit.rho_eff

    def causal_constraints(self) -> list[tuple[int, float]]:
        """``(alpha_i, sum_{k<i} a_k)`` for i = 1..A; last value pinned to G."""
        out, cum = [], 0.0
        ev = self.arrivals.events
        for i in range(1, len(ev)):
            cum += ev[i - 1][1]
            out.append((ev[i][0], cum))
        G = self.total
        if out and abs(out[-1][1] - G) <= FEAS_ATOL * max(1.0, G):
            out[-1] = (out[-1][0], G)
        return out

    def deadline_constraints(self) -> list[tuple[int, float]]:
        """``(delta_j, sum_{k<=j} d_k)`` for j = 1..D."""
        out, cum = [], 0.0
        for idx, d in self.deadlines.events:
            cum += d
            out.append((idx, cum))
        out[-1] = (out[-1][0], self.total)
        return out

    def with_channel(self, channel: ChannelTrace) -> "Instance":
        return Instance(self.grid, self.arrivals, self.deadlines, channel, self.circuit)

    def with_circuit(self, circuit: CircuitParams) -> "Instance":
        return Instance(self.grid, self.arrivals, self.deadlines, self.channel, circuit)

    # -- JSON document form ---------------------------------------------

    def to_dict(self) -> dict:
        if self.channel.is_static:
            channel = {"static_gain": self.channel.static_gain}
        else:
            channel = {"gains": list(self.channel.gains)}
        return {
            "boundaries": list(self.grid.boundaries),
            "arrivals": [{"epoch": e, "amount": a} for e, a in self.arrivals.events],
            "deadlines": [{"epoch": e, "amount": d} for e, d in self.deadlines.events],
            "channel": channel,
            "circuit": {
                "rho": self.circuit.rho,
                "eta": self.circuit.eta,
                "beta": self.circuit.beta,
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Instance":
        try:
            ch = doc["channel"]
            circ = doc.get("circuit", {})
            return cls(
                EpochGrid(tuple(doc["boundaries"])),
                ArrivalProcess(tuple(doc["arrivals"])),
                DeadlineProcess(tuple(doc["deadlines"])),
                ChannelTrace(
                    static_gain=ch.get("static_gain"),
                    gains=None if ch.get("gains") is None else tuple(ch["gains"]),
                ),
                CircuitParams(
                    rho=float(circ.get("rho", 0.0)),
                    eta=float(circ.get("eta", 1.0)),
                    beta=float(circ.get("beta", 0.0)),
                ),
            )
        except InstanceError:
            raise
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            raise InstanceError(f"malformed instance document: {exc!r}") from exc


def check_feasible(instance: Instance) -> None:
    """Raise unless every deadline can be met from strictly earlier arrivals.

    Rates are unbounded, so the instance is feasible iff the cumulative
    demand at each deadline has arrived strictly before it and the totals
    agree.
    """
    arrived = instance.arrivals.total
    demanded = instance.deadlines.total
    if abs(arrived - demanded) > FEAS_ATOL * max(1.0, demanded):
        raise TotalsMismatch(arrived, demanded)
    arr = instance.arrivals.events
    cum_d, avail, i = 0.0, 0.0, 0
    for j, (delta, d) in enumerate(instance.deadlines.events, start=1):
        cum_d += d
        while i < len(arr) and arr[i][0] < delta:
            avail += arr[i][1]
            i += 1
        if cum_d > avail + FEAS_ATOL * max(1.0, cum_d):
            raise InfeasibleDemand(j, cum_d, avail)


def is_feasible(instance: Instance) -> bool:
    try:
        check_feasible(instance)
    except (InfeasibleDemand, TotalsMismatch):
        return False
    return True


def cumulative_curves(
    instance: Instance,
) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """Breakpoints ``(t, value)`` of the arrival curve A(t) and D_min(t).

    Both are right-continuous step functions (``u(0) = 1``); each breakpoint
    gives the value from that instant on.
    """
    t = instance.grid.boundaries
    arr, cum = [], 0.0
    for idx, a in instance.arrivals.events[:-1]:
        cum += a
        arr.append((t[idx], cum))
    dmin, cum = [], 0.0
    for idx, d in instance.deadlines.events:
        cum += d
        dmin.append((t[idx], cum))
    return arr, dmin


def step_value(breakpoints: Sequence[tuple[float, float]], t: float) -> float:
    """Evaluate a right-continuous step curve given by its breakpoints."""
    val = 0.0
    for tb, v in breakpoints:
        if tb <= t:
            val = v
        else:
            break
    return val


def curve_value(points: Sequence[tuple[float, float]], t: float) -> float:
    """Linear interpolation through ``points`` (flat beyond the ends)."""
    ts = np.array([p[0] for p in points])
    vs = np.array([p[1] for p in points])
    return float(np.interp(t, ts, vs))


@dataclass(frozen=True, eq=False)
class Schedule:
    """Per-epoch rates and on-times; on-time sits at the head of its epoch.

    ``energy`` is the solver objective ``sum((P(r_n; g_n) + rho_eff) l_n)``.
    """

    rates: np.ndarray
    on_times: np.ndarray
    lengths: np.ndarray
    gains: np.ndarray
    rho_eff: float
    energy: float

    @property
    def phi(self) -> np.ndarray:
        return self.rates * self.on_times

    @property
    def n_epochs(self) -> int:
        return len(self.rates)

    def recost(self, gains=None, rho_eff=None, model: PowerModel = SHANNON) -> float:
        """Energy of the same (r, l) pairs under other gains or circuit power."""
        g = self.gains if gains is None else np.asarray(gains, dtype=float)
        rho = self.rho_eff if rho_eff is None else rho_eff
        return schedule_energy(self.rates, self.on_times, g, rho, model)


def schedule_energy(rates, on_times, gains, rho_eff: float, model: PowerModel = SHANNON) -> float:
    rates = np.asarray(rates, dtype=float)
    on = np.asarray(on_times, dtype=float)
    active = on > 0
    if not active.any():
        return 0.0
    g = np.broadcast_to(np.asarray(gains, dtype=float), rates.shape)
    with np.errstate(over="ignore"):  # an overflowing schedule costs inf
        per = (model.power(rates[active], g[active]) + rho_eff) * on[active]
    return math.fsum(per.tolist())


def make_schedule(
    instance: Instance, rates, on_times, *, rho_eff: float | None = None,
    model: PowerModel = SHANNON,
) -> Schedule:
    rates = np.asarray(rates, dtype=float).copy()
    on = np.asarray(on_times, dtype=float).copy()
    if rates.shape != (instance.n_epochs,) or on.shape != rates.shape:
        raise InstanceError(
            f"schedule dimension {rates.shape}/{on.shape} does not match N={instance.n_epochs}"
        )
    rates[on <= 0] = 0.0
    on[on < 0] = 0.0
    rho = instance.rho_eff if rho_eff is None else rho_eff
    gains = instance.gains
    energy = schedule_energy(rates, on, gains, rho, model)
    rates.setflags(write=False)
    on.setflags(write=False)
    return Schedule(rates, on, instance.lengths, gains, rho, energy)


def departure_curve(schedule: Schedule, grid: EpochGrid) -> list[tuple[float, float]]:
    """Piecewise-linear departure curve D(t) as breakpoints ``(t, D)``."""
    if schedule.n_epochs != grid.n_epochs:
        raise InstanceError(
            f"schedule has {schedule.n_epochs} epochs, grid has {grid.n_epochs}"
        )
    t = grid.boundaries
    pts = [(t[0], 0.0)]
    total = 0.0
    for n in range(grid.n_epochs):
        start, end = t[n], t[n + 1]
        l = min(float(schedule.on_times[n]), end - start)
        if l > 0:
            total += float(schedule.rates[n]) * l
            on_end = start + l
            if on_end < end:
                pts.append((on_end, total))
        pts.append((end, total))
    return pts


def constraint_slacks(instance: Instance, phi) -> tuple[np.ndarray, np.ndarray]:
    """Slacks of C1 (``U_i - S(alpha_i)``) and C2 (``S(delta_j) - D_j``)."""
    S = np.concatenate([[0.0], np.cumsum(np.asarray(phi, dtype=float))])
    causal = np.array([U - S[idx] for idx, U in instance.causal_constraints()])
    dead = np.array([S[idx] - D for idx, D in instance.deadline_constraints()])
    return causal, dead


def is_schedule_feasible(instance: Instance, schedule: Schedule, atol: float = FEAS_ATOL) -> bool:
    if np.any(schedule.on_times > schedule.lengths * (1 + 1e-12) + 1e-15):
        return False
    if np.any(schedule.rates < 0) or np.any(schedule.on_times < 0):
        return False
    causal, dead = constraint_slacks(instance, schedule.phi)
    return bool(np.all(causal >= -atol) and np.all(dead >= -atol))


def _merge_times(times: Iterable[float], horizon: float) -> np.ndarray:
    ts = sorted(float(x) for x in times if 0.0 <= x <= horizon)
    tol = 1e-12 * max(1.0, horizon)
    out = [0.0]
    for x in ts:
        if x - out[-1] > tol:
            out.append(x)
    if horizon - out[-1] > tol:
        out.append(horizon)
    else:
        out[-1] = horizon
    return np.asarray(out)


def build_instance_from_times(
    arrival_times: Sequence[float],
    arrival_amounts: Sequence[float],
    deadline_times: Sequence[float],
    deadline_amounts: Sequence[float],
    horizon: float,
    circuit: CircuitParams,
    *,
    gain: float | None = None,
    channel_breaks: Sequence[float] | None = None,
    channel_gains: Sequence[float] | None = None,
) -> Instance:
    """Assemble an epoch-indexed instance from timestamped events.

    Epoch boundaries are the union of data event instants and, for a
    piecewise-constant channel, its change instants.  ``channel_gains[k]``
    holds on ``[channel_breaks[k], channel_breaks[k+1])`` with
    ``channel_breaks[0] == 0``.
    """
    extra: list[float] = []
    if channel_gains is not None:
        if channel_breaks is None or len(channel_breaks) != len(channel_gains):
            raise InstanceError("channel_breaks and channel_gains must align")
        extra = [b for b in channel_breaks if 0 < b < horizon]
    times = _merge_times(
        list(arrival_times) + list(deadline_times) + extra + [horizon], horizon
    )

    def idx_of(x: float) -> int:
        k = int(np.argmin(np.abs(times - x)))
        if abs(times[k] - x) > 1e-9 * max(1.0, horizon):
            raise InstanceError(f"event time {x} not on the merged grid")
        return k

    arrivals: dict[int, float] = {}
    for x, a in zip(arrival_times, arrival_amounts):
        k = idx_of(x)
        arrivals[k] = arrivals.get(k, 0.0) + float(a)
    deadlines: dict[int, float] = {}
    for x, d in zip(deadline_times, deadline_amounts):
        k = idx_of(x)
        deadlines[k] = deadlines.get(k, 0.0) + float(d)
    N = len(times) - 1
    arr_events = sorted((k, a) for k, a in arrivals.items() if k < N or a != 0)
    dl_events = sorted((k, d) for k, d in deadlines.items() if d > 0)
    if channel_gains is not None:
        mids = 0.5 * (times[:-1] + times[1:])
        pos = np.searchsorted(np.asarray(channel_breaks, dtype=float), mids, side="right") - 1
        channel = ChannelTrace(gains=tuple(np.asarray(channel_gains, dtype=float)[pos]))
    else:
        channel = ChannelTrace(static_gain=1.0 if gain is None else gain)
    return Instance(
        EpochGrid(tuple(times)),
        ArrivalProcess(tuple(arr_events)),
        DeadlineProcess(tuple(dl_events)),
        channel,
        circuit,
    )
