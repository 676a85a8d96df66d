"""Optimal offline schedule over a time-varying (block-fading) channel.

Same scan as the static solver, but segments share a water level ``w``
instead of a rate: epoch ``n`` is off below ``w_ee(g_n)``, runs on-off at
``r_ee(g_n)`` exactly at it, and is always on at ``P'^{-1}(w; g_n)`` above.
Candidate levels come from inverting the (staircase) total departure of a
prefix of epochs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Instance, Schedule, check_feasible, make_schedule
from .power import SHANNON, TIE_RTOL, PowerModel, ee_rate
from .taut_static import Binding, merge_equal

__all__ = [
    "WaterSegment",
    "WaterPlan",
    "solve_water_level",
    "first_change_w",
    "schedule_fading",
    "epoch_ee_tables",
]


@dataclass(frozen=True)
class WaterSegment:
    tau: int
    level: float
    delta: float
    binding: Binding


WaterPlan = tuple  # tuple[WaterSegment, ...]


def epoch_ee_tables(gains, rho_eff: float, model: PowerModel = SHANNON):
    """Per-epoch ``(r_ee, w_ee)`` arrays."""
    gains = np.asarray(gains, dtype=float)
    uniq, inv = np.unique(gains, return_inverse=True)
    pts = [ee_rate(float(g), rho_eff, model) for g in uniq]
    r_ee = np.array([p.r_ee for p in pts])[inv]
    w_ee = np.array([p.w_ee for p in pts])[inv]
    return r_ee, w_ee


def _bounds(w, w_ee, r_ee, g, L, model):
    """Total departure interval ``[F_lo(w), F_hi(w)]`` over the given epochs."""
    on = w > w_ee * (1 + TIE_RTOL)
    tie = ~on & (w >= w_ee * (1 - TIE_RTOL))
    lo = float(np.dot(model.rate_from_water(w, g[on]), L[on])) if on.any() else 0.0
    hi = lo + (float(np.dot(r_ee[tie], L[tie])) if tie.any() else 0.0)
    return lo, hi


def _water_level(w_ee, r_ee, g, L, target: float, model: PowerModel) -> float:
    """Smallest ``w`` with ``F_hi(w) >= target`` (so ``F_lo(w) <= target``)."""
    if target <= 0:
        return 0.0
    brk = np.unique(w_ee)
    # smallest breakpoint whose upper departure reaches the target
    a, b = 0, len(brk)
    while a < b:
        mid = (a + b) // 2
        if _bounds(brk[mid], w_ee, r_ee, g, L, model)[1] >= target:
            b = mid
        else:
            a = mid + 1
    if a < len(brk):
        f_lo, _ = _bounds(brk[a], w_ee, r_ee, g, L, model)
        if f_lo <= target:
            return float(brk[a])
        lo_w, hi_w = float(brk[a - 1]), float(brk[a])
    else:
        lo_w = float(brk[-1])
        hi_w = 2.0 * lo_w
        with np.errstate(over="ignore"):
            while _bounds(hi_w, w_ee, r_ee, g, L, model)[0] < target:
                if not math.isfinite(hi_w):
                    return math.inf  # beyond double range; never the binding level
                lo_w, hi_w = hi_w, 2.0 * hi_w
    # departure is continuous and increasing strictly between breakpoints
    for _ in range(200):
        mid = 0.5 * (lo_w + hi_w)
        if mid <= lo_w or mid >= hi_w:
            break
        if _bounds(mid, w_ee, r_ee, g, L, model)[0] < target:
            lo_w = mid
        else:
            hi_w = mid
    return hi_w


def _key(w_ee, r_ee, g, L, target: float, upper: bool, model: PowerModel):
    """Ordering key ``(w, theta)`` for one constraint.

    At a breakpoint the epochs sitting at their ``w_ee`` each send
    ``theta * r_ee * L``, which makes every epoch's departure monotone in
    the lexicographic key.  An upper bound takes the largest key meeting it,
    a lower bound the smallest.
    """
    w = _water_level(w_ee, r_ee, g, L, target, model)
    if w <= 0:
        return (0.0, 0.0)
    f_lo, f_hi = _bounds(w, w_ee, r_ee, g, L, model)
    if f_hi > f_lo:
        return (w, min(1.0, max(0.0, (target - f_lo) / (f_hi - f_lo))))
    return (w, 1.0 if upper else 0.0)


def solve_water_level(
    prefix_epochs: Sequence[tuple[float, float]],
    target: float,
    rho_eff: float,
    model: PowerModel = SHANNON,
) -> float:
    """Water level whose departure over ``(g_n, L_n)`` epochs covers ``target``.

    Returns the smallest ``w`` with ``sum Phi_hi(w) >= target`` and
    ``sum Phi_lo(w) <= target``; ``0`` for a zero target.
    """
    arr = np.asarray(prefix_epochs, dtype=float).reshape(-1, 2)
    g, L = arr[:, 0], arr[:, 1]
    r_ee, w_ee = epoch_ee_tables(g, rho_eff, model)
    return _water_level(w_ee, r_ee, g, L, float(target), model)


class _Tables:
    def __init__(self, instance: Instance, model: PowerModel):
        self.g = instance.gains
        self.L = instance.lengths
        self.r_ee, self.w_ee = epoch_ee_tables(self.g, instance.rho_eff, model)
        self.model = model

    def level(self, start: int, stop: int, target: float) -> float:
        s = slice(start, stop)
        return _water_level(self.w_ee[s], self.r_ee[s], self.g[s], self.L[s], target, self.model)

    def key(self, start: int, stop: int, target: float, upper: bool):
        s = slice(start, stop)
        return _key(self.w_ee[s], self.r_ee[s], self.g[s], self.L[s], target, upper, self.model)


def _scan_w(tab: _Tables, offset, base, up, pa, lo, pd, last):
    w_plus, w_minus = (math.inf, 1.0), (0.0, 0.0)
    tau_p = tau_m = offset
    d_p = d_m = base
    i, j = pa, pd
    nu, nl = len(up), len(lo)
    while i < nu or j < nl:
        if i < nu and (j >= nl or up[i][0] <= lo[j][0]):
            k, v = up[i]
            c = tab.key(offset, k, v - base, True)
            if c <= w_plus:
                tau_p, w_plus, d_p = k, c, v
            i += 1
        else:
            k, v = lo[j]
            c = tab.key(offset, k, v - base, False)
            if c >= w_minus:
                tau_m, w_minus, d_m = k, c, v
            j += 1
        if w_minus > w_plus and tau_m < tau_p:
            return tau_m, w_minus, d_m, Binding.DEADLINE
        if w_minus >= w_plus and tau_m >= tau_p:
            kind = Binding.TERMINAL if tau_p == last else Binding.CAUSALITY
            return tau_p, w_plus, d_p, kind
    total = lo[-1][1]
    return last, tab.key(offset, last, total - base, False), total, Binding.TERMINAL


def first_change_w(instance: Instance, model: PowerModel = SHANNON) -> tuple[int, float, float]:
    """First level-changing epoch ``tau``, the level before it and the data
    delivered by then."""
    check_feasible(instance)
    tab = _Tables(instance, model)
    up = instance.causal_constraints()
    lo = instance.deadline_constraints()
    tau, (w, _), delta, _ = _scan_w(tab, 0, 0.0, up, 0, lo, 0, instance.n_epochs)
    return tau, w, delta


def schedule_fading(instance: Instance, model: PowerModel = SHANNON) -> tuple[Schedule, WaterPlan]:
    """Optimal schedule for per-epoch gains and its water-level plan.

    Epochs sitting exactly at ``w_ee(g_n)`` absorb whatever the always-on
    epochs leave of the segment's data, respecting inner constraints.
    """
    check_feasible(instance)
    tab = _Tables(instance, model)
    N = instance.n_epochs
    L, g = tab.L, tab.g
    up = instance.causal_constraints()
    lo = instance.deadline_constraints()

    rates = np.zeros(N)
    on = np.zeros(N)
    plan = []
    offset, base, pa, pd = 0, 0.0, 0, 0
    while offset < N:
        tau, (w, theta), delta, kind = _scan_w(tab, offset, base, up, pa, lo, pd, N)
        plan.append(WaterSegment(tau, w, delta, kind))
        sl = slice(offset, tau)
        w_ee, r_ee, Ls = tab.w_ee[sl], tab.r_ee[sl], L[sl]
        amount = delta - base
        is_on = w > w_ee * (1 + TIE_RTOL)
        tie = ~is_on & (w >= w_ee * (1 - TIE_RTOL)) & (w > 0)
        phi = np.where(is_on, model.rate_from_water(w, g[sl]) * Ls, 0.0)
        phi[tie] = theta * r_ee[tie] * Ls[tie]
        # bisection and theta leave ~1e-15 relative slack; pin the total
        free = tie if tie.any() and theta > 0 else is_on
        if free.any():
            weight = phi[free] if phi[free].sum() > 0 else Ls[free]
            phi[free] += (amount - phi.sum()) * weight / weight.sum()
        seg_rates = np.zeros(len(Ls))
        seg_on = np.zeros(len(Ls))
        seg_rates[is_on] = phi[is_on] / Ls[is_on]
        seg_on[is_on] = Ls[is_on]
        t_act = tie & (phi > 0)
        seg_rates[t_act] = r_ee[t_act]
        seg_on[t_act] = np.minimum(phi[t_act] / r_ee[t_act], Ls[t_act])
        rates[sl] = seg_rates
        on[sl] = seg_on
        offset, base = tau, delta
        while pa < len(up) and up[pa][0] <= tau:
            pa += 1
        while pd < len(lo) and lo[pd][0] <= tau:
            pd += 1
    sched = make_schedule(instance, rates, on, model=model)
    return sched, merge_equal(plan, key="level")

