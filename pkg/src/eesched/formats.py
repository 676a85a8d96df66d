"""File formats: instance JSON, schedule / curve / event-log CSV."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InstanceError
from .model import Instance, Schedule, make_schedule
from .power import SHANNON, PowerModel

__all__ = [
    "read_instance",
    "write_atomic",
    "schedule_to_csv",
    "schedule_from_csv",
    "curve_to_csv",
    "event_log_to_csv",
]


def read_instance(path: str | os.PathLike) -> Instance:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    return Instance.from_dict(doc)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _epoch_energies(s: Schedule, model: PowerModel) -> np.ndarray:
    out = np.zeros(s.n_epochs)
    for n in range(s.n_epochs):
        if s.on_times[n] > 0:
            out[n] = (float(model.power(s.rates[n], s.gains[n])) + s.rho_eff) * s.on_times[n]
    return out


def schedule_to_csv(schedule: Schedule, plan: Sequence | None = None, *,
                    with_gain: bool = False, model: PowerModel = SHANNON) -> str:
    """``epoch,rate,on_time,phi,energy`` (plus ``gain``), plan as ``#`` rows.

    Rates and on-times keep full precision so a schedule can be read back
    and re-verified; energies carry 9 significant digits.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["epoch", "rate", "on_time", "phi", "energy"] + (["gain"] if with_gain else [])
    w.writerow(head)
    e = _epoch_energies(schedule, model)
    for n in range(schedule.n_epochs):
        row = [
            n + 1,
            repr(float(schedule.rates[n])),
            repr(float(schedule.on_times[n])),
            repr(float(schedule.phi[n])),
            f"{e[n]:.9g}",
        ]
        if with_gain:
            row.append(repr(float(schedule.gains[n])))
        w.writerow(row)
    if plan:
        key = "rate" if hasattr(plan[0], "rate") else "level"
        buf.write(f"# plan: tau,{key},delta,binding\n")
        for seg in plan:
            buf.write(f"# {seg.tau},{getattr(seg, key)!r},{seg.delta!r},{seg.binding.value}\n")
    buf.write(f"# total_energy,{schedule.energy:.9g}\n")
    return buf.getvalue()


def schedule_from_csv(text: str, instance: Instance, *, model: PowerModel = SHANNON) -> Schedule:
    """Rebuild a schedule for ``instance`` from :func:`schedule_to_csv` output."""
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(rows)
    rates, on = [], []
    try:
        for row in reader:
            rates.append(float(row["rate"]))
            on.append(float(row["on_time"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed schedule CSV: {exc!r}") from exc
    return make_schedule(instance, rates, on, model=model)


def curve_to_csv(points: Sequence[tuple[float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value"])
    for t, v in points:
        w.writerow([repr(float(t)), repr(float(v))])
    return buf.getvalue()


def event_log_to_csv(log: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", "event", "buffer", "energy_so_far"])
    for row in log:
        w.writerow([repr(float(row["time"])), row["event"], repr(float(row["buffer"])),
                    f"{row['energy_so_far']:.9g}"])
    return buf.getvalue()
