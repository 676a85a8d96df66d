"""Power-rate model and the scalar energy-efficiency computations.

All solvers talk to the channel only through a :class:`PowerModel`
(``P``, ``P'`` and the inverse of ``P'``) plus the EE-maximizing rate
derived from it.  The Shannon model ``P(r; g) = (e^r - 1) / g`` is the
shipped instance.

Circuit power enters the optimization as a single effective constant
``rho_eff = eta * (rho - beta)``; see :func:`normalize_circuit`.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NegativeEffectiveRho

__all__ = [
    "CircuitParams",
    "PowerModel",
    "ShannonPower",
    "SHANNON",
    "EeRate",
    "TIE_RTOL",
    "normalize_circuit",
    "reported_energy",
    "ee_rate",
    "ee_residual",
    "rate_from_water",
    "epoch_departure",
    "epoch_energy",
]

# relative tolerance for classifying w == w_ee (and r == r_ee)
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class CircuitParams:
    """Transmitter circuit parameters.

    rho is the "on" circuit power (W), eta the RF-chain efficiency in
    (0, 1] and beta the "off" power (W).
    """

    rho: float
    eta: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho >= 0):
            raise ValueError(f"rho must be finite and >= 0, got {self.rho}")
        if not (0 < self.eta <= 1):
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")

    @property
    def rho_eff(self) -> float:
        return normalize_circuit(self)


def normalize_circuit(params: CircuitParams) -> float:
    """Effective circuit power ``eta * (rho - beta)`` seen by the solvers.

    Minimizing ``sum((P/eta + rho) l + beta (L - l))`` has the same argmin
    as minimizing ``sum((P + eta (rho - beta)) l)``.
    """
    if params.beta > params.rho:
        raise NegativeEffectiveRho(
            f"off power beta={params.beta} exceeds on power rho={params.rho}"
        )
    return params.eta * (params.rho - params.beta)


def reported_energy(objective: float, params: CircuitParams, horizon: float) -> float:
    """Convert a solver objective (in rho_eff units) back to physical Joules.

    Adds the idle floor ``beta * T``, charged over the whole horizon.
    """
    return objective / params.eta + params.beta * horizon


class PowerModel(ABC):
    """Strictly convex, strictly increasing rate-to-power map with P(0) = 0."""

    @abstractmethod
    def power(self, r, g):
        """Transmit power needed for rate ``r`` at power gain ``g``."""

    @abstractmethod
    def dpower(self, r, g):
        """First derivative of :meth:`power` in ``r``."""

    @abstractmethod
    def inv_dpower(self, w, g):
        """Inverse of :meth:`dpower`; may be negative below ``P'(0)``."""

    def rate_from_water(self, w, g):
        """Rate minimizing ``P(r) - w r`` over ``r >= 0``."""
        return np.maximum(0.0, self.inv_dpower(w, g))


@dataclass(frozen=True)
class ShannonPower(PowerModel):
    """``P(r; g) = (e^r - 1) / g`` with rates in nats/s/Hz."""

    # rates past ~709 nats/s/Hz overflow to inf, which is the honest cost
    def power(self, r, g):
        with np.errstate(over="ignore"):
            return np.expm1(r) / g

    def dpower(self, r, g):
        with np.errstate(over="ignore"):
            return np.exp(r) / g

    def inv_dpower(self, w, g):
        return np.log(g) + np.log(w)  # g * w can overflow near the double range


SHANNON = ShannonPower()


@dataclass(frozen=True)
class EeRate:
    """EE-maximizing operating point for one channel gain.

    ``unit_cost`` is the minimum Joules per data unit, ``(P(r_ee)+rho)/r_ee``;
    at ``rho = 0`` it degenerates to the limit ``P'(0)``.
    """

    r_ee: float
    w_ee: float
    unit_cost: float
    gain: float
    rho_eff: float


def ee_residual(r, g: float, rho_eff: float, model: PowerModel = SHANNON):
    """``P'(r) r - (P(r) + rho)``: negative below r_ee, positive above."""
    return model.dpower(r, g) * r - (model.power(r, g) + rho_eff)


def ee_rate(g: float, rho_eff: float, model: PowerModel = SHANNON) -> EeRate:
    """EE-maximizing rate for gain ``g`` by bisection on :func:`ee_residual`.

    The residual is strictly increasing for strictly convex ``P``, equals
    ``-rho`` at zero and diverges upward, so a bracket always exists.
    """
    return _ee_rate_cached(float(g), float(rho_eff), model)


@lru_cache(maxsize=65536)
def _ee_rate_cached(g: float, rho_eff: float, model: PowerModel) -> EeRate:
    if not (g > 0 and math.isfinite(g)):
        raise ValueError(f"gain must be finite and > 0, got {g}")
    if rho_eff < 0:
        raise NegativeEffectiveRho(f"rho_eff must be >= 0, got {rho_eff}")
    if rho_eff == 0:
        w0 = float(model.dpower(0.0, g))
        return EeRate(0.0, w0, w0, g, 0.0)

    def h(r):
        return float(ee_residual(r, g, rho_eff, model))

    lo, hi = 0.0, 1.0
    while h(hi) <= 0:
        lo, hi = hi, 2.0 * hi
    # tighter than the 1e-10 contract; stop once the bracket stops shrinking
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= 1e-15 * max(1.0, hi):
            break
        if h(mid) < 0:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    w = float(model.dpower(r, g))
    cost = (float(model.power(r, g)) + rho_eff) / r
    return EeRate(r, w, cost, g, rho_eff)


def rate_from_water(w: float, g: float, model: PowerModel = SHANNON) -> float:
    """``max(0, P'^{-1}(w; g))``; for Shannon ``max(0, ln(g w))``."""
    if not w > 0:
        raise ValueError(f"water level must be > 0, got {w}")
    return float(model.rate_from_water(w, g))


def epoch_departure(
    w: float, g: float, L: float, rho_eff: float, model: PowerModel = SHANNON
) -> tuple[float, float]:
    """Departure interval ``[lo, hi]`` of one epoch under water level ``w``.

    Set-valued exactly at ``w == w_ee(g)``, where the epoch may run on-off
    at ``r_ee`` for any fraction of its length.
    """
    ee = ee_rate(g, rho_eff, model)
    if w < ee.w_ee * (1 - TIE_RTOL):
        return 0.0, 0.0
    if w <= ee.w_ee * (1 + TIE_RTOL):
        return 0.0, ee.r_ee * L
    x = float(model.rate_from_water(w, g)) * L
    return x, x


def epoch_energy(phi, g, L, rho_eff: float, model: PowerModel = SHANNON):
    """Minimal energy to send ``phi`` units inside one epoch of length ``L``.

    On-off at r_ee while ``phi <= r_ee L``, always-on at ``phi / L`` beyond.
    Accepts scalars or broadcastable arrays (``g`` must then be scalar).
    """
    ee = ee_rate(g, rho_eff, model)
    phi = np.asarray(phi, dtype=float)
    on_rate = np.where(phi > 0, phi / L, 0.0)
    full = (model.power(on_rate, g) + rho_eff) * L
    out = np.where(phi <= ee.r_ee * L, phi * ee.unit_cost, full)
    out = np.where(phi > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out
