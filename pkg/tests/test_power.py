"""Power model and EE-rate scalars.

Independent oracles: scipy's bounded scalar minimizer for the EE rate,
closed forms for the Shannon model.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from eesched import SHANNON, CircuitParams, NegativeEffectiveRho, ee_rate, epoch_departure, epoch_energy, normalize_circuit
from eesched.power import ee_residual, rate_from_water, reported_energy

E = math.e
gains = st.floats(0.05, 20.0)
rhos = st.floats(0.01, 20.0)


def test_normalize_circuit():
    assert normalize_circuit(CircuitParams(rho=3, eta=1, beta=0)) == 3
    assert normalize_circuit(CircuitParams(rho=3, eta=0.5, beta=1)) == pytest.approx(1.0)
    with pytest.raises(NegativeEffectiveRho):
        normalize_circuit(CircuitParams(rho=1, eta=1, beta=2))


def test_reported_energy_adds_idle_power():
    c = CircuitParams(rho=3, eta=0.5, beta=1)
    assert reported_energy(2.0, c, 10.0) == pytest.approx(2.0 / 0.5 + 1 * 10.0)


def test_ee_rate_spot_values():
    ee = ee_rate(1, 1)
    assert ee.r_ee == pytest.approx(1.0, abs=1e-9)
    assert ee.w_ee == pytest.approx(E, rel=1e-9)
    assert ee.unit_cost == pytest.approx(E, rel=1e-9)
    assert ee_rate(2, 3).r_ee == pytest.approx(1.8146, abs=1e-3)
    assert ee_rate(2, 0).r_ee == 0


@settings(max_examples=200, deadline=None)
@given(gains, rhos)
def test_ee_rate_minimizes_cost_per_unit(g, rho):
    ee = ee_rate(g, rho)
    cost = lambda r: (SHANNON.power(r, g) + rho) / r
    ref = minimize_scalar(cost, bounds=(1e-9, 60.0), method="bounded", options={"xatol": 1e-12})
    assert ee.unit_cost <= ref.fun * (1 + 1e-9)
    assert ee.unit_cost == pytest.approx(cost(ee.r_ee), rel=1e-12)
    assert ee.w_ee == pytest.approx(SHANNON.dpower(ee.r_ee, g), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(gains, rhos, st.floats(0.01, 0.99))
def test_residual_sign_pattern(g, rho, frac):
    ee = ee_rate(g, rho)
    assert ee_residual(ee.r_ee * frac, g, rho) < 0
    assert ee_residual(ee.r_ee / frac, g, rho) > 0


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 30.0), gains)
def test_inverse_derivative(r, g):
    assert rate_from_water(SHANNON.dpower(r, g), g) == pytest.approx(r, abs=1e-10)


def test_rate_from_water_examples():
    assert rate_from_water(1 / 3, 3) == pytest.approx(0.0, abs=1e-15)
    assert rate_from_water(E**2, 1) == pytest.approx(2.0)
    assert rate_from_water(0.1, 1) == 0.0
    with pytest.raises(ValueError):
        rate_from_water(0.0, 1)


def test_epoch_departure_examples():
    assert epoch_departure(0.5, 1, 1, 1) == (0.0, 0.0)
    lo, hi = epoch_departure(E, 1, 1, 1)
    assert lo == 0.0 and hi == pytest.approx(1.0)
    lo, hi = epoch_departure(E**2, 1, 1, 1)
    assert lo == hi == pytest.approx(2.0)


@settings(max_examples=100, deadline=None)
@given(gains, rhos, st.floats(0.1, 5), st.floats(1e-6, 10), st.floats(1e-6, 10))
def test_epoch_departure_monotone(g, rho, L, x, y):
    w_ee = ee_rate(g, rho).w_ee
    w1, w2 = w_ee * (1 + x), w_ee * (1 + x + y)
    assert epoch_departure(w1, g, L, rho)[1] <= epoch_departure(w2, g, L, rho)[0] + 1e-12


def test_epoch_energy_examples():
    assert epoch_energy(0, 1, 1, 1) == 0
    assert epoch_energy(1, 1, 1, 1) == pytest.approx(E, abs=1e-9)
    assert epoch_energy(2, 1, 1, 1) == pytest.approx(E**2, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(gains, rhos, st.floats(0.1, 5), st.floats(0, 20), st.floats(0, 20))
def test_epoch_energy_convex(g, rho, L, a, b):
    mid = epoch_energy((a + b) / 2, g, L, rho)
    avg = (epoch_energy(a, g, L, rho) + epoch_energy(b, g, L, rho)) / 2
    assert mid <= avg + 1e-9 * max(1.0, avg)


@settings(max_examples=100, deadline=None)
@given(gains, rhos, st.floats(0.1, 5), st.floats(0, 10))
def test_epoch_energy_is_minimal_over_on_times(g, rho, L, phi):
    # brute force over the on-time: (P(phi/l)+rho) l for l in (0, L]
    ls = np.linspace(L / 2000, L, 2000)
    with np.errstate(over="ignore"):
        brute = np.min((SHANNON.power(phi / ls, g) + rho) * ls)
    assert epoch_energy(phi, g, L, rho) <= brute * (1 + 1e-9) + 1e-12
