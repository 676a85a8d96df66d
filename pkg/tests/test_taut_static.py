"""Static-channel solver against closed forms and the grid oracle."""
import math

import numpy as np
import pytest
from hypothesis import given, settings

from eesched import Instance, clip_from_ideal, ee_rate, first_change_r, ideal_schedule, is_schedule_feasible, schedule_static
from eesched.taut_static import Binding
from eesched.verify import check_plan_monotone, check_structure, oracle_energy, oracle_tolerance

from conftest import instances

E = math.e


def test_first_change_two_deadlines(two_deadline):
    tau, r, delta = first_change_r(two_deadline)
    assert (tau, delta) == (1, pytest.approx(3.0))
    assert r == pytest.approx(3.0)


def test_first_change_single_segment():
    inst = Instance.build([0, 1, 3], [(0, 5)], [(2, 5)], gain=1, rho=1)
    tau, r, delta = first_change_r(inst)
    assert tau == 2 and delta == pytest.approx(5) and r == pytest.approx(max(1.0, 5 / 3))
    loose = Instance.build([0, 1, 3], [(0, 1)], [(2, 1)], gain=1, rho=1)
    assert first_change_r(loose)[1] == pytest.approx(1.0)  # clipped at r_ee


def test_strict_single(strict_single):
    s, plan = schedule_static(strict_single)
    assert s.rates[0] == pytest.approx(2.0) and s.on_times[0] == pytest.approx(0.5)
    assert s.energy == pytest.approx(E**2 / 2, abs=1e-9)
    assert len(plan) == 1 and plan[0].binding == Binding.TERMINAL


def test_on_off(on_off):
    s, _ = schedule_static(on_off)
    np.testing.assert_allclose(s.rates, [1, 1])
    np.testing.assert_allclose(s.on_times, [0.5, 0.5])
    assert s.energy == pytest.approx(E, abs=1e-9)


def test_two_deadline(two_deadline):
    s, plan = schedule_static(two_deadline)
    np.testing.assert_allclose(s.rates, [3, 1])
    np.testing.assert_allclose(s.on_times, [1, 1])
    assert s.energy == pytest.approx(E**3 + E, abs=1e-9)
    assert [p.binding for p in plan] == [Binding.DEADLINE, Binding.TERMINAL]


def test_clip_from_ideal_examples():
    ee = ee_rate(1, 1)
    inst = Instance.build([0, 1], [(0, 1)], [(1, 1)], gain=1, rho=1)
    ideal, _ = ideal_schedule(inst)
    c = clip_from_ideal(ideal, ee)
    assert c.rates[0] == pytest.approx(1.0) and c.on_times[0] == pytest.approx(1.0)
    half = Instance.build([0, 1], [(0, 0.5)], [(1, 0.5)], gain=1, rho=1)
    c = clip_from_ideal(ideal_schedule(half)[0], ee)
    assert (c.rates[0], c.on_times[0]) == (pytest.approx(1.0), pytest.approx(0.5))
    fast = Instance.build([0, 1], [(0, 2)], [(1, 2)], gain=1, rho=1)
    c = clip_from_ideal(ideal_schedule(fast)[0], ee)
    assert (c.rates[0], c.on_times[0]) == (pytest.approx(2.0), pytest.approx(1.0))


def test_rejects_fading_without_gain(fading_two):
    with pytest.raises(ValueError):
        schedule_static(fading_two)


@settings(max_examples=80, deadline=None)
@given(instances())
def test_static_properties(inst):
    s, plan = schedule_static(inst)
    assert is_schedule_feasible(inst, s)
    assert check_structure(s)[1] == []
    assert check_plan_monotone(plan) == []
    assert plan[-1].tau == inst.n_epochs
    assert [p.tau for p in plan] == sorted({p.tau for p in plan})
    ee = ee_rate(inst.channel.static_gain, inst.rho_eff)
    c = clip_from_ideal(ideal_schedule(inst)[0], ee)
    np.testing.assert_allclose(c.phi, s.phi, rtol=0, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(instances(max_epochs=4))
def test_static_matches_oracle(inst):
    s, _ = schedule_static(inst)
    ref = oracle_energy(inst, 200)
    assert s.energy <= ref + 1e-9 * max(1.0, ref)
    assert ref - s.energy <= oracle_tolerance(inst, 200)
