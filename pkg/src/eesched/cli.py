"""Command-line front end.

Exit codes: 0 success, 1 infeasible instance or failed verification,
2 I/O or parse error.  Output files are written atomically; without
``--out`` results go to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bench import TrialConfig, rows_to_csv, run_energy_comparison, run_scaling, summarize
from .errors import InstanceError, SchedulingError
from .formats import (
    curve_to_csv,
    event_log_to_csv,
    read_instance,
    schedule_from_csv,
    schedule_to_csv,
    write_atomic,
)
from .model import cumulative_curves, departure_curve
from .online import config_for, simulate_online, stream_from_instance
from .power import CircuitParams, reported_energy
from .taut_fading import schedule_fading
from .taut_static import schedule_static
from .verify import verify_schedule

DEFAULT_SEED = 0


class _ParseError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _solve(args, fading: bool) -> int:
    inst = read_instance(args.instance)
    if fading:
        sched, plan = schedule_fading(inst)
    else:
        if not inst.is_static:
            raise _ParseError("instance has per-epoch gains; use solve-fading")
        sched, plan = schedule_static(inst)
    if args.format == "json":
        key = "level" if fading else "rate"
        doc = {
            "rates": sched.rates.tolist(),
            "on_times": sched.on_times.tolist(),
            "phi": sched.phi.tolist(),
            "energy": float(f"{reported_energy(sched.energy, inst.circuit, inst.horizon):.9g}"),
            "plan": [
                {"tau": s.tau, key: getattr(s, key), "delta": s.delta, "binding": s.binding.value}
                for s in plan
            ],
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _emit(schedule_to_csv(sched, plan, with_gain=fading), args.out)
    if args.out:
        print(f"energy {reported_energy(sched.energy, inst.circuit, inst.horizon):.9g} J")
    return 0


def _verify(args) -> int:
    inst = read_instance(args.instance)
    with open(args.schedule, encoding="utf-8") as fh:
        sched = schedule_from_csv(fh.read(), inst)
    plan = None
    if inst.is_static:
        # the certificate is built from the solver's plan, so it only
        # applies when the schedule under test matches the solver's output
        ref, ref_plan = schedule_static(inst)
        if np.allclose(ref.phi, sched.phi, rtol=1e-9, atol=1e-12):
            plan = ref_plan
    report = verify_schedule(inst, sched, plan, oracle_grid=args.oracle_grid)
    _emit(report.to_json() + "\n", args.out)
    return 0 if report.passed else 1


def _simulate(args) -> int:
    inst = read_instance(args.instance)
    energy, log = simulate_online(stream_from_instance(inst), config_for(inst, forecast=args.forecast))
    _emit(event_log_to_csv(log), args.out)
    if args.out:
        print(f"energy {reported_energy(energy, inst.circuit, inst.horizon):.9g} J")
    return 0


def _bench_energy(args) -> int:
    rows = []
    circuit = CircuitParams(rho=args.rho, eta=args.eta, beta=args.beta)
    for T in args.T:
        cfg = TrialConfig(T=T, G=args.G, channel=args.channel, gain=args.gain,
                          mean_power=args.gain, circuit=circuit, trials=args.trials,
                          seed=args.seed)
        rows += run_energy_comparison(cfg, jobs=args.jobs)
    _emit(rows_to_csv(rows), args.out)
    summary = json.dumps(summarize(rows), indent=2, sort_keys=True) + "\n"
    if args.summary:
        write_atomic(args.summary, summary)
    elif args.out:
        sys.stdout.write(summary)
    return 0


def _bench_scaling(args) -> int:
    rows = run_scaling(tuple(args.sizes), reps=args.reps, seed=args.seed, fading=args.fading)
    lines = ["events,median_ms"] + [f"{r['events']},{r['median_ms']:.6f}" for r in rows]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _curves(args) -> int:
    inst = read_instance(args.instance)
    if args.curve == "departure":
        sched, _ = schedule_static(inst) if inst.is_static else schedule_fading(inst)
        pts = departure_curve(sched, inst.grid)
    else:
        arr, dmin = cumulative_curves(inst)
        pts = arr if args.curve == "arrivals" else dmin
    _emit(curve_to_csv(pts), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eesched", description="Energy-optimal transmission schedules.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True):
        if instance:
            sp.add_argument("--instance", required=True, help="instance JSON file")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        return sp

    common(sub.add_parser("solve-static", help="optimal schedule, static channel"))
    common(sub.add_parser("solve-fading", help="optimal schedule, per-epoch gains"))
    v = common(sub.add_parser("verify", help="check a schedule CSV against an instance"))
    v.add_argument("--schedule", required=True)
    v.add_argument("--oracle-grid", type=int, default=None, help="also run the grid oracle")
    s = common(sub.add_parser("simulate-online", help="replan-on-arrival simulation"))
    s.add_argument("--forecast", action="store_true", help="planner knows future gains")

    b = common(sub.add_parser("bench-energy", help="randomized energy comparison"), instance=False)
    b.add_argument("--T", type=float, nargs="+", default=[60.0, 240.0, 960.0, 1920.0])
    b.add_argument("--G", type=float, default=40.0)
    b.add_argument("--trials", type=int, default=50)
    b.add_argument("--channel", choices=("static", "rayleigh"), default="static")
    b.add_argument("--gain", type=float, default=2.0, help="static gain or mean power gain")
    b.add_argument("--rho", type=float, default=3.0)
    b.add_argument("--eta", type=float, default=1.0)
    b.add_argument("--beta", type=float, default=0.0)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--summary", help="summary JSON file")

    sc = common(sub.add_parser("bench-scaling", help="solve time against event count"), instance=False)
    sc.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    sc.add_argument("--reps", type=int, default=15)
    sc.add_argument("--fading", action="store_true")
    sc.add_argument("--jobs", type=int, default=1)

    c = common(sub.add_parser("curves", help="arrival / demand / departure curves"))
    c.add_argument("--curve", choices=("arrivals", "deadlines", "departure"), default="departure")
    return p


_HANDLERS = {
    "solve-static": lambda a: _solve(a, False),
    "solve-fading": lambda a: _solve(a, True),
    "verify": _verify,
    "simulate-online": _simulate,
    "bench-energy": _bench_energy,
    "bench-scaling": _bench_scaling,
    "curves": _curves,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError, _ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InstanceError as exc:
        # malformed documents are parse errors; infeasibility is its own code
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchedulingError, ValueError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
