"""The ``eesched`` command on a small instance file.

Equivalent shell session::

    eesched solve-static --instance two_deadline.json --out schedule.csv
    eesched verify --instance two_deadline.json --schedule schedule.csv --oracle-grid 200
"""
import json
import tempfile
from pathlib import Path

from eesched import Instance
from eesched.cli import main

with tempfile.TemporaryDirectory() as tmp:
    d = Path(tmp)
    inst = Instance.build([0, 1, 2], [(0, 4)], [(1, 3), (2, 1)], gain=1, rho=1)
    (d / "two_deadline.json").write_text(json.dumps(inst.to_dict(), indent=1))
    print((d / "two_deadline.json").read_text())

    rc = main(["solve-static", "--instance", str(d / "two_deadline.json"), "--out", str(d / "schedule.csv")])
    print("solve-static exit", rc)
    print((d / "schedule.csv").read_text())

    rc = main(["verify", "--instance", str(d / "two_deadline.json"), "--schedule", str(d / "schedule.csv"),
               "--oracle-grid", "200", "--out", str(d / "report.json")])
    print("verify exit", rc, "passed:", json.loads((d / "report.json").read_text())["passed"])

    rc = main(["solve-static", "--instance", str(d / "missing.json")])
    print("missing file exit", rc)
