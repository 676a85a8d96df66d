"""Independent checks on schedules.

* :func:`oracle_energy` - brute-force minimum over a grid of cumulative
  departures.  For a fixed per-epoch amount the best on-time is known in
  closed form (:func:`eesched.power.epoch_energy`), so the problem is a
  chain of convex one-epoch costs under box constraints on the running
  sum; dynamic programming over a grid solves it without touching the
  tautening code.
* :func:`kkt_certificate` - rebuilds Lagrange multipliers from a static
  plan and checks them (nonnegativity, per-epoch stationarity,
  complementary slackness).
* :func:`check_structure` / :func:`check_plan_monotone` - off / on-off / on
  trichotomy per epoch and the direction of every rate (or level) change.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import CertificateError, InstanceError, StructureMismatch
from .model import (
    FEAS_ATOL,
    Instance,
    Schedule,
    check_feasible,
    constraint_slacks,
)
from .power import SHANNON, PowerModel, ee_rate, epoch_energy
from .taut_static import Binding

__all__ = [
    "ORACLE_MAX_EPOCHS",
    "REFINE_PASSES",
    "Multipliers",
    "VerificationReport",
    "oracle_energy",
    "oracle_tolerance",
    "kkt_certificate",
    "check_structure",
    "check_plan_monotone",
    "verify_schedule",
]

ORACLE_MAX_EPOCHS = 8
# Each pass halves the step in a window around the best path.  Two passes
# leave errors of order P''(r) h^2 on steep instances, well above the
# G * unit_cost / grid_points bar, so refinement keeps going; it is cheap
# because the window holds a fixed 33 points per stage.
REFINE_PASSES = 24
_REFINE_WINDOW = 8  # half-width, in steps of the previous pass


# ---------------------------------------------------------------------------
# grid oracle


def _stage_bounds(instance: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Box ``[lo_k, hi_k]`` on the running sum ``S_k``, k = 0..N."""
    N = instance.n_epochs
    lo = np.zeros(N + 1)
    hi = np.full(N + 1, math.inf)
    for k, D in instance.deadline_constraints():
        lo[k] = max(lo[k], D)
    for k, U in instance.causal_constraints():
        hi[k] = min(hi[k], U)
    lo = np.maximum.accumulate(lo)
    hi = np.minimum.accumulate(hi[::-1])[::-1]
    G = instance.total
    lo[0] = hi[0] = 0.0
    lo[N] = hi[N] = G
    return lo, np.minimum(hi, G)


def _dp(points: list[np.ndarray], instance: Instance, model: PowerModel):
    """Min-cost path through per-stage candidate sums; returns (cost, path)."""
    L, g, rho = instance.lengths, instance.gains, instance.rho_eff
    cost = np.zeros(1)
    back = []
    for n in range(instance.n_epochs):
        prev, cur = points[n], points[n + 1]
        phi = cur[None, :] - prev[:, None]
        ok = phi >= -1e-12
        step = np.where(ok, epoch_energy(np.clip(phi, 0.0, None), float(g[n]), float(L[n]), rho, model), np.inf)
        total = cost[:, None] + step
        arg = np.argmin(total, axis=0)  # first minimum: deterministic tie-break
        cost = total[arg, np.arange(len(cur))]
        back.append(arg)
    path = [0]
    for arg in reversed(back):
        path.append(int(arg[path[-1]]))
    path.reverse()
    sums = np.array([points[k][i] for k, i in enumerate(path)])
    return float(cost[0]), sums


def _candidates(lo, hi, grid, extra):
    pts = grid[(grid >= lo) & (grid <= hi)]
    more = [x for x in extra if lo <= x <= hi]
    return np.unique(np.concatenate([pts, [lo, hi], more]))


def oracle_energy(
    instance: Instance,
    grid_points: int = 400,
    model: PowerModel = SHANNON,
    *,
    refine_passes: int = REFINE_PASSES,
) -> float:
    """Grid-search minimum energy of ``instance`` (upper bound on the optimum).

    Parameters
    ----------
    instance : Instance
        Feasible instance with at most ``ORACLE_MAX_EPOCHS`` epochs.
    grid_points : int
        Cells across ``[0, G]`` in the first pass (>= 50).
    refine_passes : int
        Follow-up passes, each halving the step in a window around the
        best path found so far.

    Returns
    -------
    float
        Objective in ``rho_eff`` units, comparable to ``Schedule.energy``.
    """
    if grid_points < 50:
        raise ValueError(f"grid_points must be >= 50, got {grid_points}")
    if instance.n_epochs > ORACLE_MAX_EPOCHS:
        raise InstanceError(
            f"oracle limited to {ORACLE_MAX_EPOCHS} epochs, got {instance.n_epochs}"
        )
    check_feasible(instance)
    G = instance.total
    if G <= 0:
        return 0.0
    lo, hi = _stage_bounds(instance)
    extra = [v for _, v in instance.causal_constraints()]
    extra += [v for _, v in instance.deadline_constraints()]
    step = G / grid_points
    grid = np.linspace(0.0, G, grid_points + 1)
    N = instance.n_epochs
    pts = [_candidates(lo[k], hi[k], grid, extra) for k in range(N + 1)]
    best, path = _dp(pts, instance, model)
    for _ in range(refine_passes):
        step /= 2
        offs = step * np.arange(-2 * _REFINE_WINDOW, 2 * _REFINE_WINDOW + 1)
        pts = [
            _candidates(lo[k], hi[k], np.clip(path[k] + offs, lo[k], hi[k]), extra)
            for k in range(N + 1)
        ]
        e, p = _dp(pts, instance, model)
        if e <= best:
            best, path = e, p
    return best


def oracle_tolerance(instance: Instance, grid_points: int = 400, model: PowerModel = SHANNON) -> float:
    """``G * max unit cost / grid_points`` - the acceptable oracle gap."""
    costs = [ee_rate(float(g), instance.rho_eff, model).unit_cost for g in np.unique(instance.gains)]
    return instance.total * max(costs) / grid_points


# ---------------------------------------------------------------------------
# KKT certificate


@dataclass(frozen=True)
class Multipliers:
    """Multipliers on the causal (``lam``) and deadline (``mu``) constraints,
    in the order of :meth:`Instance.causal_constraints` and
    :meth:`Instance.deadline_constraints`; ``w`` is the per-epoch price."""

    lam: np.ndarray
    mu: np.ndarray
    w: np.ndarray

    def to_dict(self) -> dict:
        return {"lambda": self.lam.tolist(), "mu": self.mu.tolist(), "w": self.w.tolist()}


def _water_from(instance: Instance, lam, mu) -> np.ndarray:
    N = instance.n_epochs
    w = np.zeros(N)
    # epoch n (0-based, covering (t_n, t_{n+1}]) is constrained by every
    # constraint at index >= n+1
    for (k, _), m in zip(instance.deadline_constraints(), mu):
        w[:k] += m
    for (k, _), l in zip(instance.causal_constraints(), lam):
        w[:k] -= l
    return w


def kkt_certificate(
    instance: Instance,
    schedule: Schedule,
    plan: Sequence,
    *,
    tol: float = 1e-9,
    model: PowerModel = SHANNON,
) -> Multipliers:
    """Rebuild and check multipliers for a static-channel optimal schedule.

    The last deadline gets ``P'`` of the final rate; every interior change
    point gets the jump in ``P'`` across it, on the causal constraint when
    the plan says it binds on arrivals and on the deadline constraint
    otherwise.

    Raises
    ------
    StructureMismatch
        A change point whose rate moves the wrong way (negative multiplier).
    CertificateError
        Stationarity or complementary slackness fails beyond ``tol``.
    """
    if not instance.is_static:
        raise CertificateError("certificate construction covers static channels only")
    g = instance.channel.static_gain
    rho = schedule.rho_eff
    causal = instance.causal_constraints()
    dead = instance.deadline_constraints()
    c_pos = {k: i for i, (k, _) in enumerate(causal)}
    d_pos = {k: j for j, (k, _) in enumerate(dead)}
    lam = np.zeros(len(causal))
    mu = np.zeros(len(dead))

    plan = list(plan)
    if not plan or plan[-1].tau != instance.n_epochs:
        raise CertificateError("plan does not end at the horizon")
    dp = [float(model.dpower(s.rate, g)) for s in plan]
    mu[-1] += dp[-1]
    for m, seg in enumerate(plan[:-1]):
        jump = dp[m + 1] - dp[m]
        scale = max(abs(dp[m]), abs(dp[m + 1]))
        if seg.binding == Binding.CAUSALITY:
            if seg.tau not in c_pos:
                raise CertificateError(f"no arrival constraint at epoch {seg.tau}")
            if jump < -tol * scale:
                raise StructureMismatch(
                    f"rate falls across the arrival binding at epoch {seg.tau}"
                )
            lam[c_pos[seg.tau]] += max(jump, 0.0)
        elif seg.binding == Binding.DEADLINE:
            if seg.tau not in d_pos:
                raise CertificateError(f"no deadline constraint at epoch {seg.tau}")
            if -jump < -tol * scale:
                raise StructureMismatch(
                    f"rate rises across the deadline binding at epoch {seg.tau}"
                )
            mu[d_pos[seg.tau]] += max(-jump, 0.0)
        else:
            raise StructureMismatch(f"terminal binding before the horizon (epoch {seg.tau})")

    w = _water_from(instance, lam, mu)
    # magnitude of the terms summed into each price; steep segments make
    # the prices a difference of large multipliers, so rounding scales here
    w_abs = _water_from(instance, -lam, mu)

    # w must equal P' of the plan rate on each segment
    w_plan = np.empty_like(w)
    start = 0
    for m, seg in enumerate(plan):
        sl = slice(start, seg.tau)
        scale = np.maximum(max(1.0, dp[m]), w_abs[sl])
        if np.any(np.abs(w[sl] - dp[m]) > tol * scale):
            raise CertificateError(f"price not constant on segment ending at {seg.tau}")
        w_plan[sl] = dp[m]
        start = seg.tau

    _check_stationary(schedule, w_plan, np.full(schedule.n_epochs, g), rho, tol, model)

    # complementary slackness
    cs, ds = constraint_slacks(instance, schedule.phi)
    scale = max(1.0, instance.total)
    for i, (l, s) in enumerate(zip(lam, cs)):
        if l > 0 and abs(s) > tol * scale:
            raise CertificateError(f"lambda_{i + 1} > 0 but arrival constraint slack {s:.3g}")
    for j, (m, s) in enumerate(zip(mu, ds)):
        if m > 0 and abs(s) > tol * scale:
            raise CertificateError(f"mu_{j + 1} > 0 but deadline constraint slack {s:.3g}")
    if np.any(cs < -FEAS_ATOL * scale) or np.any(ds < -FEAS_ATOL * scale):
        raise CertificateError("schedule is infeasible")
    return Multipliers(lam, mu, w_plan)


def _check_stationary(schedule: Schedule, w, gains, rho, tol, model):
    """Each (r_n, l_n) must minimize ``(P(r) + rho - w r) l`` on its box."""
    for n in range(schedule.n_epochs):
        ee = ee_rate(float(gains[n]), rho, model)
        r, l, L = float(schedule.rates[n]), float(schedule.on_times[n]), float(schedule.lengths[n])
        wn = float(w[n])
        rtol = max(tol, 1e-9) * 10
        if wn > ee.w_ee * (1 + rtol):
            r_star = float(model.rate_from_water(wn, gains[n]))
            if abs(l - L) > tol * max(1.0, L) or abs(r - r_star) > rtol * max(1.0, r_star):
                raise CertificateError(f"epoch {n + 1}: should run always-on at {r_star:.6g}")
        elif wn < ee.w_ee * (1 - rtol):
            if l * r > tol:
                raise CertificateError(f"epoch {n + 1}: should be off")
        elif l > 0 and r > 0 and abs(r - ee.r_ee) > rtol * max(1.0, ee.r_ee):
            raise CertificateError(f"epoch {n + 1}: on-off epoch must run at r_ee")


# ---------------------------------------------------------------------------
# structure checks

OFF, ON_OFF, ON = "off", "on-off", "on"


def check_structure(
    schedule: Schedule,
    gains=None,
    rho_eff: float | None = None,
    *,
    tol: float = 1e-9,
    model: PowerModel = SHANNON,
) -> tuple[list[str], list[int]]:
    """Label each epoch off / on-off / on; also return violating epochs.

    An epoch violates the structure when it runs below its r_ee, or above
    r_ee without staying on for the whole epoch.  Gains and circuit power
    default to the ones the schedule was costed with.
    """
    g = schedule.gains if gains is None else np.broadcast_to(np.asarray(gains, float), schedule.rates.shape)
    rho = schedule.rho_eff if rho_eff is None else rho_eff
    labels, bad = [], []
    for n in range(schedule.n_epochs):
        r, l, L = float(schedule.rates[n]), float(schedule.on_times[n]), float(schedule.lengths[n])
        r_ee = ee_rate(float(g[n]), rho, model).r_ee
        if l <= 0 or r <= 0:
            labels.append(OFF)
            continue
        if r < r_ee * (1 - tol):
            labels.append(ON_OFF if l < L else ON)
            bad.append(n)
        elif r <= r_ee * (1 + tol):
            labels.append(ON_OFF)
        else:
            labels.append(ON)
            if l < L * (1 - tol):
                bad.append(n)
    return labels, bad


def check_plan_monotone(plan: Sequence, key: str | None = None) -> list[int]:
    """Change points whose direction contradicts their binding.

    Across an arrival binding the rate (or level) must go up, across a
    deadline binding it must go down.  Returns offending ``tau`` values.
    """
    plan = list(plan)
    if not plan:
        return []
    if key is None:
        key = "rate" if hasattr(plan[0], "rate") else "level"
    bad = []
    for a, b in zip(plan, plan[1:]):
        x, y = getattr(a, key), getattr(b, key)
        if a.binding == Binding.CAUSALITY and not y > x:
            bad.append(a.tau)
        elif a.binding == Binding.DEADLINE and not y < x:
            bad.append(a.tau)
        elif a.binding == Binding.TERMINAL:
            bad.append(a.tau)
    return bad


# ---------------------------------------------------------------------------
# report


@dataclass
class VerificationReport:
    causal_slacks: list[float]
    deadline_slacks: list[float]
    feasible: bool
    labels: list[str]
    structure_violations: list[int]
    plan_violations: list[int]
    multipliers: dict | None
    certificate_error: str | None
    oracle_energy: float | None
    oracle_gap: float | None
    oracle_tolerance: float | None
    energy: float
    passed: bool = field(default=False)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def verify_schedule(
    instance: Instance,
    schedule: Schedule,
    plan: Sequence | None = None,
    *,
    oracle_grid: int | None = None,
    model: PowerModel = SHANNON,
) -> VerificationReport:
    """Run every applicable check and collect the outcome.

    The certificate needs a static channel and a plan; the oracle runs when
    ``oracle_grid`` is given and the instance is small enough.
    """
    cs, ds = constraint_slacks(instance, schedule.phi)
    scale = max(1.0, instance.total)
    feasible = bool(np.all(cs >= -FEAS_ATOL * scale) and np.all(ds >= -FEAS_ATOL * scale))
    labels, bad = check_structure(schedule, model=model)
    plan_bad = check_plan_monotone(plan) if plan else []

    mult, cert_err = None, None
    if plan is not None and instance.is_static:
        try:
            mult = kkt_certificate(instance, schedule, plan, model=model).to_dict()
        except CertificateError as exc:
            cert_err = str(exc)

    o_e = gap = o_tol = None
    if oracle_grid is not None and instance.n_epochs <= ORACLE_MAX_EPOCHS:
        o_e = oracle_energy(instance, oracle_grid, model)
        gap = schedule.energy - o_e
        o_tol = oracle_tolerance(instance, oracle_grid, model)

    ok = feasible and not bad and not plan_bad and cert_err is None
    if gap is not None:
        ok = ok and abs(gap) <= o_tol and gap <= o_tol
    return VerificationReport(
        causal_slacks=cs.tolist(),
        deadline_slacks=ds.tolist(),
        feasible=feasible,
        labels=labels,
        structure_violations=bad,
        plan_violations=plan_bad,
        multipliers=mult,
        certificate_error=cert_err,
        oracle_energy=o_e,
        oracle_gap=gap,
        oracle_tolerance=o_tol,
        energy=schedule.energy,
        passed=ok,
    )
