"""Baseline policies: spot values and dominance by the optimum."""
import math

import numpy as np
import pytest
from hypothesis import given, settings

from eesched import Instance, heuristic1, heuristic2, heuristic3, is_schedule_feasible, schedule_fading, schedule_static

from conftest import instances

E = math.e


def test_heuristic1_examples(on_off, two_deadline, strict_single):
    h = heuristic1(on_off)
    np.testing.assert_allclose(h.rates, [0.5, 0.5])
    assert h.energy == pytest.approx(2 * E**0.5, abs=1e-9)
    assert heuristic1(two_deadline).energy == pytest.approx(E**3 + E, abs=1e-9)
    assert heuristic1(strict_single).energy == pytest.approx(schedule_static(strict_single)[0].energy)


def test_heuristic2_examples(on_off, two_deadline):
    assert heuristic2(on_off).energy == pytest.approx(2 * E**0.5, abs=1e-9)
    fast = Instance.build([0, 1, 2], [(0, 5)], [(1, 3), (2, 2)], gain=1, rho=1)
    assert heuristic2(fast).energy == pytest.approx(schedule_static(fast)[0].energy, abs=1e-9)
    ideal = Instance.build([0, 1, 2], [(0, 1)], [(2, 1)], gain=1, rho=0)
    assert heuristic2(ideal).energy == pytest.approx(schedule_static(ideal)[0].energy, abs=1e-12)


def test_heuristic3_examples(fading_two, two_deadline):
    assert heuristic3(fading_two).energy > schedule_fading(fading_two)[0].energy + 1e-6
    const = two_deadline.with_channel(type(two_deadline.channel)(gains=(1.0, 1.0)))
    assert heuristic3(const).energy == pytest.approx(schedule_static(two_deadline)[0].energy, abs=1e-9)
    gap = Instance.build([0, 1, 2, 3], [(0, 1), (2, 1)], [(1, 1), (3, 1)], gains=[1, 2, 3], rho=1)
    h = heuristic3(gap)
    assert h.phi[1] == 0 and h.on_times[1] == 0


@settings(max_examples=60, deadline=None)
@given(instances())
def test_optimum_dominates_static(inst):
    opt = schedule_static(inst)[0].energy
    for h in (heuristic1, heuristic2):
        s = h(inst)
        assert is_schedule_feasible(inst, s)
        assert opt <= s.energy + 1e-9 * max(1.0, s.energy)


@settings(max_examples=60, deadline=None)
@given(instances(fading=True))
def test_optimum_dominates_fading(inst):
    opt = schedule_fading(inst)[0].energy
    for h in (heuristic1, heuristic2, heuristic3):
        s = h(inst)
        assert is_schedule_feasible(inst, s)
        assert opt <= s.energy + 1e-9 * max(1.0, s.energy)
