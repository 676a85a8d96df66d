"""Instance generator and experiment harness."""
import numpy as np
import pytest

from eesched.bench import (
    CSV_FIELDS,
    TrialConfig,
    generate_instance,
    rows_to_csv,
    run_energy_comparison,
    run_scaling,
    scaling_instance,
    summarize,
    trial_seed,
)
from eesched import is_feasible


def test_same_seed_same_instance():
    cfg = TrialConfig(T=60)
    a = generate_instance(cfg, np.random.default_rng(trial_seed(cfg, 3)))
    b = generate_instance(cfg, np.random.default_rng(trial_seed(cfg, 3)))
    assert a.to_dict() == b.to_dict()
    assert trial_seed(cfg, 3) != trial_seed(cfg, 4)


def test_arrival_count_and_totals():
    cfg = TrialConfig(T=60, mean_gap=6)
    counts = []
    for k in range(1000):
        inst = generate_instance(cfg, np.random.default_rng(k))
        counts.append(sum(1 for _, a in inst.arrivals.events if a > 0))
        assert inst.total == pytest.approx(40.0, abs=1e-12)
        assert is_feasible(inst)
    assert abs(np.mean(counts) - 10) <= 5


def test_rayleigh_instance_has_per_second_gains():
    cfg = TrialConfig(T=30, channel="rayleigh")
    inst = generate_instance(cfg, np.random.default_rng(1))
    assert not inst.is_static
    assert inst.n_epochs >= 30


def test_config_guards():
    with pytest.raises(ValueError):
        TrialConfig(T=60, trials=0)
    with pytest.raises(ValueError):
        TrialConfig(T=60, channel="awgn")


def test_comparison_rows_and_dominance():
    cfg = TrialConfig(T=120, trials=6, seed=7)
    rows = run_energy_comparison(cfg)
    assert {r["scheme"] for r in rows} == {"optimal", "heuristic1", "heuristic2", "online"}
    by = {}
    for r in rows:
        by.setdefault(r["trial"], {})[r["scheme"]] = r["energy"]
    for t in by.values():
        assert t["optimal"] <= min(t.values()) + 1e-9 * t["optimal"]
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    assert len(text.splitlines()) == len(rows) + 1
    s = summarize(rows)
    assert s["120"]["trials"] == 6 and s["120"]["heuristic1"]["mean_ratio"] >= 1


def test_parallel_matches_serial():
    cfg = TrialConfig(T=60, trials=4, seed=3)
    a = [(r["trial"], r["scheme"], r["energy"]) for r in run_energy_comparison(cfg, jobs=1)]
    b = [(r["trial"], r["scheme"], r["energy"]) for r in run_energy_comparison(cfg, jobs=2)]
    assert a == b


def test_scaling_instances_feasible():
    rng = np.random.default_rng(0)
    for n in (2, 16, 64):
        for fading in (False, True):
            assert is_feasible(scaling_instance(n, rng, fading=fading))
    rows = run_scaling((2,), reps=3)
    assert rows[0]["events"] == 2 and rows[0]["median_ms"] < 1.0
