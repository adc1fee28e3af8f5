"""Thermal packet sizing and multi-collision amplitude budgets.

If every object of mass mu settles into the decoherence-minimizing packet
size, dimensional analysis with temperature as the only extra scale gives

    sigma_mu = hbar / sqrt(mu k_B T),

the geometric mean of the reduced Compton wavelength hbar/(mu c) and the
thermal length hbar c / (k_B T) (about 0.229 cm at 1 K).  With the momentum
set by 1-D equipartition, hbar^2 k^2 / 2 mu = k_B T / 2, the product
k sigma is exactly 1 under these conventions, independent of temperature
and mass.  All outputs are order-of-magnitude estimates: the proportionality
constant is taken as 1.

SI units throughout this module; CODATA 2018 constants to 12 digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "HBAR",
    "K_B",
    "C_LIGHT",
    "ELECTRON_MASS",
    "ThermalDesign",
    "CollisionBudget",
    "thermal_spread",
    "thermal_k_sigma",
    "thermal_design",
    "compton_wavelength",
    "thermal_length",
    "amplitude_budget",
    "backaction_ratio",
]

HBAR = 1.05457181765e-34        # J s
K_B = 1.380649e-23              # J / K (exact)
C_LIGHT = 2.99792458e8          # m / s (exact)
ELECTRON_MASS = 9.1093837015e-31  # kg


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (np.isfinite(value) and value > 0.0):
        raise ValueError(f"{name} must be positive and finite, got {value}")
    return value


def thermal_spread(mu: float, T: float) -> float:
    """Packet size sigma_mu = hbar / sqrt(mu k_B T) in meters."""
    mu = _check_positive("mass", mu)
    T = _check_positive("temperature", T)
    return HBAR / math.sqrt(mu * K_B * T)


def compton_wavelength(mu: float) -> float:
    """Reduced Compton wavelength hbar/(mu c) in meters."""
    mu = _check_positive("mass", mu)
    return HBAR / (mu * C_LIGHT)


def thermal_length(T: float) -> float:
    """Thermal length hbar c / (k_B T) in meters; 2.29e-3 m at 1 K."""
    T = _check_positive("temperature", T)
    return HBAR * C_LIGHT / (K_B * T)


def thermal_k_sigma(mu: float, T: float) -> float:
    """Product k sigma with equipartition momentum and thermal packet size.

    k = sqrt(mu k_B T)/hbar cancels sigma_mu exactly, so the value is 1 for
    every mass and temperature under the adopted constants.
    """
    k = math.sqrt(_check_positive("mass", mu) * K_B * _check_positive("temperature", T)) / HBAR
    return k * thermal_spread(mu, T)


@dataclass(frozen=True)
class ThermalDesign:
    """Thermal packet size and its geometric-mean decomposition."""

    mu: float
    T: float
    sigma_mu: float
    k_sigma_est: float
    compton_wavelength: float
    thermal_length: float


def thermal_design(mu: float, T: float) -> ThermalDesign:
    return ThermalDesign(
        mu=float(mu),
        T=float(T),
        sigma_mu=thermal_spread(mu, T),
        k_sigma_est=thermal_k_sigma(mu, T),
        compton_wavelength=compton_wavelength(mu),
        thermal_length=thermal_length(T),
    )


@dataclass(frozen=True)
class CollisionBudget:
    """Unentangled amplitude surviving a sequence of wall collisions."""

    F0_per_collision: tuple[float, ...]
    n: int
    amplitude: float
    n_half: float


def amplitude_budget(f0s: Sequence[float] | float, n: int | None = None) -> CollisionBudget:
    """Surviving amplitude prod sqrt(F0_i) after independent collisions.

    Pass either a sequence of per-collision largest eigenvalues, or a single
    F0 with a collision count n.  Also reports the collision count that
    halves the amplitude, n_half = ln(1/2)/ln(sqrt(F0)) (using the mean log
    for non-identical collisions); infinite when every F0 is 1.
    """
    if np.isscalar(f0s):
        if n is None:
            raise ValueError("a single F0 needs a collision count n")
        if n < 0:
            raise ValueError(f"collision count must be non-negative, got {n}")
        values = np.full(int(n), float(f0s))
    else:
        if n is not None and n != len(f0s):
            raise ValueError(f"n={n} disagrees with {len(f0s)} supplied eigenvalues")
        values = np.asarray(f0s, dtype=float)
    if values.size and (np.any(values <= 0.0) or np.any(values > 1.0)):
        raise ValueError("every F0 must lie in (0, 1]")
    log_amp = 0.5 * float(np.sum(np.log(values))) if values.size else 0.0
    mean_half_log = log_amp / values.size if values.size else 0.0
    n_half = math.inf if mean_half_log == 0.0 else math.log(0.5) / mean_half_log
    return CollisionBudget(
        F0_per_collision=tuple(float(v) for v in values),
        n=int(values.size),
        amplitude=math.exp(log_amp),
        n_half=n_half,
    )


def backaction_ratio(m: float, M: float) -> float:
    """Momentum-uncertainty back-action on the particle, sqrt(m/M).

    With matched spreads Sigma^2/sigma^2 = m/M, the wall's Delta P feeds a
    momentum uncertainty ~ m Delta P / M into the particle frame; relative
    to the particle's own hbar/sigma this is sqrt(m/M) = sqrt(delta/gamma).
    """
    m = _check_positive("particle mass", m)
    M = _check_positive("wall mass", M)
    return math.sqrt(m / M)
