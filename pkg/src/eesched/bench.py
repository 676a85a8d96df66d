"""Randomized energy comparisons and runtime scaling.

Trials are paired: every scheme runs on the same generated instance.  Each
trial draws from its own generator seeded by ``(master seed, T, trial)``,
so results do not depend on execution order or worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationFailed
from .heuristics import heuristic1, heuristic2, heuristic3
from .model import Instance, build_instance_from_times, is_feasible
from .online import config_for, simulate_online, stream_from_instance
from .power import CircuitParams, reported_energy
from .taut_fading import schedule_fading
from .taut_static import schedule_static

__all__ = [
    "TrialConfig",
    "trial_seed",
    "generate_instance",
    "run_trial",
    "run_energy_comparison",
    "summarize",
    "rows_to_csv",
    "scaling_instance",
    "run_scaling",
]

MAX_ATTEMPTS = 1000
CSV_FIELDS = ("trial", "seed", "T", "scheme", "energy", "runtime_ms")


@dataclass(frozen=True)
class TrialConfig:
    """One experiment cell.

    ``channel`` is ``"static"`` (gain ``gain``) or ``"rayleigh"``
    (per-second power gains, exponential with mean ``mean_power``).
    ``mean_gap`` defaults to ``T / 10``.
    """

    T: float
    G: float = 40.0
    mean_gap: float | None = None
    channel: str = "static"
    gain: float = 2.0
    mean_power: float = 2.0
    circuit: CircuitParams = field(default_factory=lambda: CircuitParams(rho=3.0))
    trials: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.channel not in ("static", "rayleigh"):
            raise ValueError(f"unknown channel kind {self.channel!r}")
        if self.gap >= self.T:
            raise ValueError("mean_gap must be smaller than T")

    @property
    def gap(self) -> float:
        return self.T / 10 if self.mean_gap is None else self.mean_gap


def trial_seed(config: TrialConfig, trial: int) -> int:
    """Per-trial 64-bit seed derived from the master seed, T and the index."""
    ss = np.random.SeedSequence([config.seed, int(round(config.T * 1000)), trial])
    return int(ss.generate_state(1, np.uint64)[0])


def _renewal(rng, gap: float, T: float) -> list[float]:
    out, t = [], 0.0
    while True:
        t += rng.uniform(0.0, 2.0 * gap)
        if t >= T:
            return out
        out.append(t)


def generate_instance(config: TrialConfig, rng: np.random.Generator) -> Instance:
    """Random feasible instance for one trial.

    Arrivals start at 0 and follow uniform gaps on ``[0, 2 mean_gap]``
    until ``T``; deadlines follow the same renewal process with the last
    one clamped to ``T``.  ``G`` is split by flat Dirichlet draws.  Draws
    that violate a deadline are rejected and redrawn.
    """
    T, G = config.T, config.G
    breaks = gains = None
    if config.channel == "rayleigh":
        n_sec = int(np.ceil(T))
        breaks = np.arange(n_sec, dtype=float)
        gains = rng.exponential(config.mean_power, n_sec)
    for _ in range(MAX_ATTEMPTS):
        at = [0.0] + _renewal(rng, config.gap, T)
        dt = _renewal(rng, config.gap, T) + [T]
        a = rng.dirichlet(np.ones(len(at))) * G
        d = rng.dirichlet(np.ones(len(dt))) * G
        a[-1] = G - a[:-1].sum()
        d[-1] = G - d[:-1].sum()
        if a[-1] < 0 or d[-1] < 0:
            continue
        inst = build_instance_from_times(
            at, a, dt, d, T, config.circuit, gain=config.gain,
            channel_breaks=breaks, channel_gains=gains,
        )
        if is_feasible(inst):
            return inst
    raise GenerationFailed(f"no feasible instance after {MAX_ATTEMPTS} draws (T={T})")


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, 1000.0 * (time.perf_counter() - t0)


def run_trial(config: TrialConfig, trial: int) -> list[dict]:
    """All schemes on one instance; one row per scheme."""
    seed = trial_seed(config, trial)
    inst = generate_instance(config, np.random.default_rng(seed))
    fading = config.channel != "static"
    solve = schedule_fading if fading else schedule_static
    schemes = [
        ("optimal", lambda i: solve(i)[0].energy),
        ("heuristic1", lambda i: heuristic1(i).energy),
        ("heuristic2", lambda i: heuristic2(i).energy),
    ]
    if fading:
        schemes.append(("heuristic3", lambda i: heuristic3(i).energy))
    schemes.append(("online", lambda i: simulate_online(stream_from_instance(i), config_for(i))[0]))
    rows = []
    for name, fn in schemes:
        try:
            e, ms = _timed(fn, inst)
        except Exception as exc:  # keep the seed with the failure
            raise RuntimeError(f"{name} failed on trial {trial} (seed {seed}): {exc}") from exc
        rows.append({
            "trial": trial,
            "seed": seed,
            "T": config.T,
            "scheme": name,
            "energy": reported_energy(e, config.circuit, config.T),
            "runtime_ms": ms,
        })
    return rows


def run_energy_comparison(config: TrialConfig, jobs: int = 1) -> list[dict]:
    """Rows ``trial, seed, T, scheme, energy, runtime_ms`` for every trial."""
    idx = range(config.trials)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(run_trial, [config] * config.trials, idx))
    else:
        parts = [run_trial(config, k) for k in idx]
    return [r for part in parts for r in part]


def summarize(rows: list[dict]) -> dict:
    """Per-T mean / geometric-mean energy ratios against the optimum."""
    by_T: dict[float, dict[int, dict[str, float]]] = {}
    for r in rows:
        by_T.setdefault(r["T"], {}).setdefault(r["trial"], {})[r["scheme"]] = r["energy"]
    out = {}
    for T, trials in sorted(by_T.items()):
        schemes = sorted({s for t in trials.values() for s in t} - {"optimal"})
        cell = {"trials": len(trials), "mean_optimal": statistics.fmean(t["optimal"] for t in trials.values())}
        for s in schemes:
            # trials whose optimum overflowed have no meaningful ratio
            ratios = [t[s] / t["optimal"] for t in trials.values()
                      if 0 < t["optimal"] < math.inf]
            if not ratios:
                continue
            cell[s] = {
                "finite_trials": len(ratios),
                "mean_ratio": statistics.fmean(ratios),
                "geomean_ratio": statistics.geometric_mean(ratios),
                "min_ratio": min(ratios),
                "max_ratio": max(ratios),
            }
        out[f"{T:g}"] = cell
    return out


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({**r, "energy": f"{r['energy']:.9g}", "runtime_ms": f"{r['runtime_ms']:.3f}"})
    return buf.getvalue()


def summary_json(rows: list[dict]) -> str:
    return json.dumps(summarize(rows), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# scaling


def scaling_instance(n_events: int, rng: np.random.Generator, *, T: float = 100.0,
                     gain: float = 2.0, circuit: CircuitParams | None = None,
                     fading: bool = False) -> Instance:
    """Feasible instance with ``n_events`` arrival + deadline instants.

    Built directly rather than by rejection: deadline demands are drawn
    below the data that has already arrived.
    """
    circuit = circuit or CircuitParams(rho=3.0)
    n_a = max(1, n_events // 2)
    n_d = max(1, n_events - n_a)
    at = np.concatenate([[0.0], np.sort(rng.uniform(0, T, n_a - 1))])
    a = rng.uniform(0.5, 1.5, n_a)
    dt = np.concatenate([np.sort(rng.uniform(0, T, n_d - 1)), [T]])
    avail = np.array([a[at < t].sum() for t in dt])
    frac = np.sort(rng.uniform(0, 1, n_d))
    cum = np.maximum.accumulate(avail * frac)
    cum[-1] = a.sum()
    d = np.diff(np.concatenate([[0.0], cum]))
    kw = {}
    if fading:
        n_sec = int(np.ceil(T))
        kw = dict(channel_breaks=np.arange(n_sec, dtype=float), channel_gains=rng.exponential(gain, n_sec))
    return build_instance_from_times(at, a, dt, d, T, circuit, gain=gain, **kw)


def run_scaling(sizes=(16, 32, 64, 128), *, reps: int = 15, seed: int = 0,
                fading: bool = False, T: float = 100.0) -> list[dict]:
    """Median solve time per event count (several instances per size)."""
    solve = schedule_fading if fading else schedule_static
    rows = []
    for n in sizes:
        rng = np.random.default_rng([seed, n])
        insts = [scaling_instance(n, rng, T=T, fading=fading) for _ in range(5)]
        times = []
        for _ in range(reps):
            t0 = time.perf_counter()
            for inst in insts:
                solve(inst)
            times.append((time.perf_counter() - t0) / len(insts))
        rows.append({"events": n, "median_ms": 1000.0 * statistics.median(times)})
    return rows
