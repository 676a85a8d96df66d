"""Oracle, KKT certificate and structure checks.

The certificate is checked independently through the dual function: with
the returned multipliers, the Lagrangian minimum over per-epoch departures
(done numerically by scipy) must equal the primal energy.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.optimize import minimize_scalar

from eesched import (
    CertificateError,
    Instance,
    InstanceError,
    StructureMismatch,
    check_structure,
    heuristic1,
    kkt_certificate,
    oracle_energy,
    schedule_static,
    verify_schedule,
)
from eesched.model import make_schedule
from eesched.power import epoch_energy
from eesched.taut_static import Binding, Segment
from eesched.verify import oracle_tolerance

from conftest import instances

E = math.e


def test_oracle_examples(strict_single, on_off):
    assert oracle_energy(strict_single) == pytest.approx(E**2 / 2, abs=oracle_tolerance(strict_single))
    assert oracle_energy(on_off) == pytest.approx(E, abs=oracle_tolerance(on_off))


def test_oracle_guards(on_off):
    with pytest.raises(ValueError):
        oracle_energy(on_off, 10)
    big = Instance.build(list(range(10)), [(0, 1)], [(9, 1)], gain=1, rho=1)
    with pytest.raises(InstanceError):
        oracle_energy(big)


def test_kkt_two_deadline(two_deadline):
    s, plan = schedule_static(two_deadline)
    m = kkt_certificate(two_deadline, s, plan)
    assert m.mu[0] == pytest.approx(E**3 - E)
    assert m.mu[-1] == pytest.approx(E)
    assert np.all(m.lam == 0)


def test_kkt_single_segment(strict_single):
    s, plan = schedule_static(strict_single)
    m = kkt_certificate(strict_single, s, plan)
    assert m.mu.tolist() == [pytest.approx(E**2)]


def test_kkt_rejects_rising_rate_after_deadline(two_deadline):
    bad = make_schedule(two_deadline, [1, 3], [1, 1])
    plan = (Segment(1, 1.0, 1.0, Binding.DEADLINE), Segment(2, 3.0, 4.0, Binding.TERMINAL))
    with pytest.raises(StructureMismatch):
        kkt_certificate(two_deadline, bad, plan)


def test_kkt_fading_not_supported(fading_two):
    with pytest.raises(CertificateError):
        kkt_certificate(fading_two, None, [])


def test_structure_flags_heuristic1(on_off):
    labels, bad = check_structure(heuristic1(on_off))
    assert bad == [0, 1]
    zero = make_schedule(on_off, [0, 0], [0, 0])
    assert check_structure(zero) == (["off", "off"], [])


def _dual_value(inst, m):
    g, rho = inst.channel.static_gain, inst.rho_eff
    total = 0.0
    for n, L in enumerate(inst.lengths):
        w = m.w[n]
        f = lambda x: epoch_energy(x, g, L, rho) - w * x
        hi = max(1.0, 4 * inst.total)
        res = minimize_scalar(f, bounds=(0.0, hi), method="bounded", options={"xatol": 1e-12})
        total += min(res.fun, f(0.0), f(hi))
    total += sum(mu * D for mu, (_, D) in zip(m.mu, inst.deadline_constraints()))
    total -= sum(lam * U for lam, (_, U) in zip(m.lam, inst.causal_constraints()))
    return total


@settings(max_examples=60, deadline=None)
@given(instances())
def test_certificate_closes_duality_gap(inst):
    s, plan = schedule_static(inst)
    m = kkt_certificate(inst, s, plan)
    assert np.all(m.lam >= 0) and np.all(m.mu >= 0)
    dual = _dual_value(inst, m)
    assert dual <= s.energy + 1e-7 * max(1.0, s.energy)
    assert dual == pytest.approx(s.energy, rel=1e-6, abs=1e-7)


def test_verify_report(two_deadline):
    s, plan = schedule_static(two_deadline)
    rep = verify_schedule(two_deadline, s, plan, oracle_grid=200)
    assert rep.passed and rep.feasible and rep.certificate_error is None
    bad = verify_schedule(two_deadline, make_schedule(two_deadline, [3, 0.5], [1, 1]))
    assert not bad.passed and not bad.feasible
