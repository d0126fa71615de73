"""Physical model for the 1D Euler equations of gas dynamics.

Conserved state vectors are numpy arrays whose last axis holds
``(rho, rho*v, E)``; every operation broadcasts over leading axes, so the
same functions serve single states, whole fields and stacked stencils.

The entropy pair used throughout the package is

    U = -rho * S,   F = -rho * v * S,   S = ln(p * rho**(-gamma)),

together with its gradient (the entropy variables) and the flux potential
``psi = w . f - F`` that entropy-conservative fluxes must telescope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# States with density or pressure at or below this are rejected, never clamped;
# clamping would hide positivity-limiter failures.
ADMISSIBLE_TOL = 1e-12


class AdmissibilityError(ValueError):
    """Raised when a state with non-positive density or pressure is used."""


@dataclass(frozen=True)
class GasModel:
    """Ideal gas with constant adiabatic exponent."""

    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"adiabatic exponent must exceed 1, got {self.gamma}")


@dataclass(frozen=True)
class EntropyPairValue:
    """Entropy density U and entropy flux F at one or many states."""

    U: np.ndarray
    F: np.ndarray


def conserved(rho, v, p, gas: GasModel) -> np.ndarray:
    """Assemble conserved variables (rho, rho*v, E) from primitives."""
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    energy = p / (gas.gamma - 1.0) + 0.5 * rho * v * v
    return np.stack(np.broadcast_arrays(rho, rho * v, energy), axis=-1)


def primitives(u, gas: GasModel):
    """Return (rho, v, p); inverse of :func:`conserved`."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    _require_positive_density(rho)
    v = u[..., 1] / rho
    p = pressure(u, gas)
    return rho, v, p


def pressure(u, gas: GasModel) -> np.ndarray:
    """Pressure p = (gamma - 1) * (E - mom^2 / (2 rho)).

    Requires positive density; the pressure itself may come out zero or
    negative (callers that need admissibility must check separately).
    """
    u = np.asarray(u, dtype=float)
    _require_positive_density(u[..., 0])
    return raw_pressure(u, gas)


def raw_pressure(u, gas: GasModel) -> np.ndarray:
    """Pressure formula with no admissibility checks.

    Intended for limiter functionals that probe tentative half-cell states,
    which may legitimately be unphysical.
    """
    u = np.asarray(u, dtype=float)
    return (gas.gamma - 1.0) * (u[..., 2] - 0.5 * u[..., 1] ** 2 / u[..., 0])


def physical_flux(u, gas: GasModel) -> np.ndarray:
    """Euler flux f(u) = (rho*v, rho*v^2 + p, v*(E + p))."""
    u = np.asarray(u, dtype=float)
    p = pressure(u, gas)
    v = u[..., 1] / u[..., 0]
    return np.stack([u[..., 1], u[..., 1] * v + p, v * (u[..., 2] + p)], axis=-1)


def entropy_pair(u, gas: GasModel) -> EntropyPairValue:
    """Entropy density and flux, U = -rho*S and F = -rho*v*S."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    p = pressure(u, gas)
    _require_admissible(rho, p)
    S = np.log(p) - gas.gamma * np.log(rho)
    v = u[..., 1] / rho
    return EntropyPairValue(U=-rho * S, F=-rho * v * S)


def entropy_density(u, gas: GasModel) -> np.ndarray:
    return entropy_pair(u, gas).U


def entropy_variables(u, gas: GasModel) -> np.ndarray:
    """Gradient w = dU/du of the entropy density.

    Satisfies w . du = dU for admissible perturbations; checked against
    finite differences in the test suite.
    """
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    p = pressure(u, gas)
    _require_admissible(rho, p)
    v = u[..., 1] / rho
    S = np.log(p) - gas.gamma * np.log(rho)
    gm1 = gas.gamma - 1.0
    w0 = gas.gamma - S - gm1 * rho * v * v / (2.0 * p)
    w1 = gm1 * rho * v / p
    w2 = -gm1 * rho / p
    return np.stack([w0, w1, w2], axis=-1)


def entropy_potential(u, gas: GasModel) -> np.ndarray:
    """Entropy flux potential psi(u) = w(u) . f(u) - F(u).

    For this pair psi reduces to (gamma - 1) * rho * v; the closed form is
    used because it is exact where the dot-product form accumulates roundoff.
    """
    u = np.asarray(u, dtype=float)
    _require_positive_density(u[..., 0])
    return (gas.gamma - 1.0) * u[..., 1]


def max_wave_speed(u, gas: GasModel) -> np.ndarray:
    """|v| + sound speed, the local Lax-Friedrichs dissipation speed."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    p = pressure(u, gas)
    _require_admissible(rho, p)
    return np.abs(u[..., 1] / rho) + np.sqrt(gas.gamma * p / rho)


def is_admissible(u, gas: GasModel) -> np.ndarray:
    """Boolean mask: density and pressure strictly above the tolerance."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        p = (gas.gamma - 1.0) * (u[..., 2] - 0.5 * u[..., 1] ** 2 / u[..., 0])
    return (rho > ADMISSIBLE_TOL) & (p > ADMISSIBLE_TOL) & np.isfinite(p)


def _require_positive_density(rho):
    if np.any(rho <= ADMISSIBLE_TOL):
        raise AdmissibilityError("non-positive density encountered")


def _require_admissible(rho, p):
    if np.any(rho <= ADMISSIBLE_TOL) or np.any(p <= ADMISSIBLE_TOL):
        raise AdmissibilityError("inadmissible state: rho or p not positive")
