"""Fading-channel solver: water levels, symmetry with the static solver."""
import math

import numpy as np
import pytest
from hypothesis import given, settings

from eesched import Instance, first_change_r, first_change_w, is_schedule_feasible, schedule_fading, schedule_static, solve_water_level
from eesched.power import SHANNON
from eesched.verify import check_plan_monotone, check_structure, oracle_energy, oracle_tolerance

from conftest import instances

E = math.e


def test_water_level_examples():
    assert solve_water_level([(1, 1)], 0.0, 1) == 0
    assert solve_water_level([(1, 1)], 2.0, 1) == pytest.approx(E**2)
    assert solve_water_level([(1, 1), (E**2, 1)], 2.0, 1) == pytest.approx(1.0)


def test_fading_two(fading_two):
    assert first_change_w(fading_two) == (2, pytest.approx(1.0), pytest.approx(2.0))
    s, plan = schedule_fading(fading_two)
    np.testing.assert_allclose(s.rates, [0, 2], atol=1e-9)
    np.testing.assert_allclose(s.on_times, [0, 1], atol=1e-9)
    assert s.energy == pytest.approx((1 - E**-2) + 1, abs=1e-9)


def test_tight_early_deadline():
    inst = Instance.build([0, 1, 2], [(0, 3)], [(1, 1), (2, 2)], gains=[1, E**2], rho=1)
    tau, w, delta = first_change_w(inst)
    assert (tau, delta) == (1, pytest.approx(1.0))
    assert w == pytest.approx(E)
    s, plan = schedule_fading(inst)
    assert s.phi == pytest.approx([1, 2])
    assert check_plan_monotone(plan) == []


def test_plateau_residual_fill():
    # one epoch at w_ee with half its capacity used: on-time 0.5 at r_ee = 1
    inst = Instance.build([0, 1, 2], [(0, 0.5)], [(2, 0.5)], gains=[1, 1e-6], rho=1)
    s, _ = schedule_fading(inst)
    assert s.rates[0] == pytest.approx(1.0) and s.on_times[0] == pytest.approx(0.5)
    assert s.on_times[1] == 0


@pytest.mark.parametrize("fixture", ["two_deadline", "on_off", "strict_single"])
def test_constant_gains_reduce_to_static(fixture, request):
    inst = request.getfixturevalue(fixture)
    fad = inst.with_channel(type(inst.channel)(gains=tuple([inst.channel.static_gain] * inst.n_epochs)))
    a, _ = schedule_static(inst)
    b, _ = schedule_fading(fad)
    assert b.energy == pytest.approx(a.energy, abs=1e-9)
    tau_r, r, d_r = first_change_r(inst)
    tau_w, w, d_w = first_change_w(fad)
    assert (tau_w, d_w) == (tau_r, pytest.approx(d_r))
    assert w == pytest.approx(float(SHANNON.dpower(r, inst.channel.static_gain)))


@settings(max_examples=80, deadline=None)
@given(instances(fading=True))
def test_fading_properties(inst):
    s, plan = schedule_fading(inst)
    assert is_schedule_feasible(inst, s)
    assert check_structure(s)[1] == []
    assert check_plan_monotone(plan) == []
    assert plan[-1].tau == inst.n_epochs


@settings(max_examples=25, deadline=None)
@given(instances(fading=True, max_epochs=4))
def test_fading_matches_oracle(inst):
    s, _ = schedule_fading(inst)
    ref = oracle_energy(inst, 200)
    assert s.energy <= ref + 1e-9 * max(1.0, ref)
    assert ref - s.energy <= oracle_tolerance(inst, 200)
