"""Numerical fluxes: dissipative LLF, entropy-conservative pairs, the convex
blend, matching numerical entropy fluxes, and predictor-corrector time
quadrature that rewrites SSP Runge-Kutta steps as single interface fluxes.

Two-point fluxes take left/right states with shape (..., 3); four-point
fluxes take a stencil window with shape (..., 4, 3) holding the cells
(k-1, k, k+1, k+2) around interface k+1/2.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import euler
from .euler import GasModel
from .mesh import BoundaryKind, FieldSnapshot, PositivityError, pad


class TimeQuadratureScheme(enum.Enum):
    FORWARD_EULER = "forward-euler"
    SSPRK22 = "ssprk22"
    SSPRK33 = "ssprk33"

    @classmethod
    def parse(cls, name) -> "TimeQuadratureScheme":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown time quadrature {name!r}") from None


# Flux accumulation weights reproducing the SSP-RK update of the base scheme.
_STAGE_WEIGHTS = {
    TimeQuadratureScheme.FORWARD_EULER: (1.0,),
    TimeQuadratureScheme.SSPRK22: (0.5, 0.5),
    TimeQuadratureScheme.SSPRK33: (1.0 / 6.0, 1.0 / 6.0, 4.0 / 6.0),
}

STENCIL_HALF_WIDTH = {"llf": 1, "ec2": 1, "ec4": 2}


def log_mean(a, b):
    """Logarithmic mean (b - a)/(ln b - ln a), series-stabilized near a = b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    zeta = a / b
    f = (zeta - 1.0) / (zeta + 1.0)
    u = f * f
    small = u < 1e-4
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.where(small, 1.0, np.log(np.where(small, 2.0, zeta)) / np.where(small, 1.0, 2.0 * f))
    series = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0
    denom = np.where(small, series, big)
    return (a + b) / (2.0 * denom)


def llf_flux(u_l, u_r, gas: GasModel) -> np.ndarray:
    """Local Lax-Friedrichs (Rusanov) flux: central mean minus wave-speed jump."""
    u_l = np.asarray(u_l, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    c = np.maximum(euler.max_wave_speed(u_l, gas), euler.max_wave_speed(u_r, gas))
    fl = euler.physical_flux(u_l, gas)
    fr = euler.physical_flux(u_r, gas)
    return 0.5 * (fl + fr) - 0.5 * c[..., None] * (u_r - u_l)


def ec_flux2(u_l, u_r, gas: GasModel) -> np.ndarray:
    """Two-point entropy-conservative flux (logarithmic-mean construction).

    Consistent, and satisfies the Tadmor jump condition
    (w_r - w_l) . h = psi_r - psi_l for the package entropy pair; that
    property, not the particular closed form, is the contract.
    """
    u_l = np.asarray(u_l, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    rho_l, v_l, p_l = euler.primitives(u_l, gas)
    rho_r, v_r, p_r = euler.primitives(u_r, gas)
    beta_l = rho_l / (2.0 * p_l)
    beta_r = rho_r / (2.0 * p_r)

    rho_log = log_mean(rho_l, rho_r)
    beta_log = log_mean(beta_l, beta_r)
    v_avg = 0.5 * (v_l + v_r)
    v2_avg = 0.5 * (v_l * v_l + v_r * v_r)
    p_tilde = 0.5 * (rho_l + rho_r) / (beta_l + beta_r)

    f_rho = rho_log * v_avg
    f_mom = v_avg * f_rho + p_tilde
    f_ene = (0.5 / ((gas.gamma - 1.0) * beta_log) - 0.5 * v2_avg) * f_rho + v_avg * f_mom
    return np.stack([f_rho, f_mom, f_ene], axis=-1)


def ec_flux4(window, gas: GasModel) -> np.ndarray:
    """Fourth-order entropy-conservative flux from 2-point building blocks.

    window[..., i, :] holds cells (k-1, k, k+1, k+2); the combination
    (4/3) h(k, k+1) - (1/6) [h(k-1, k+1) + h(k, k+2)] cancels the second-order
    dispersive error while keeping entropy conservation.
    """
    w = np.asarray(window, dtype=float)
    if w.shape[-2:] != (4, 3):
        raise ValueError(f"expected a (..., 4, 3) stencil window, got {w.shape}")
    inner = ec_flux2(w[..., 1, :], w[..., 2, :], gas)
    left = ec_flux2(w[..., 0, :], w[..., 2, :], gas)
    right = ec_flux2(w[..., 1, :], w[..., 3, :], gas)
    return (4.0 / 3.0) * inner - (1.0 / 6.0) * (left + right)


def gt_flux(alpha, g, h) -> np.ndarray:
    """Convex blend alpha * g + (1 - alpha) * h of the two fluxes."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0.0) or np.any(alpha > 1.0):
        raise ValueError("blend parameter alpha must lie in [0, 1]")
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    a = alpha[..., None] if alpha.ndim == g.ndim - 1 else alpha
    return a * g + (1.0 - a) * h


def llf_entropy_flux(u_l, u_r, gas: GasModel) -> np.ndarray:
    """Entropy flux paired with the LLF flux: central mean minus entropy jump."""
    pair_l = euler.entropy_pair(u_l, gas)
    pair_r = euler.entropy_pair(u_r, gas)
    c = np.maximum(euler.max_wave_speed(u_l, gas), euler.max_wave_speed(u_r, gas))
    return 0.5 * (pair_l.F + pair_r.F) - 0.5 * c * (pair_r.U - pair_l.U)


def ec2_entropy_flux(u_l, u_r, gas: GasModel) -> np.ndarray:
    """Tadmor's consistent entropy flux H = mean(w) . h - mean(psi)."""
    h = ec_flux2(u_l, u_r, gas)
    w_avg = 0.5 * (euler.entropy_variables(u_l, gas) + euler.entropy_variables(u_r, gas))
    psi_avg = 0.5 * (euler.entropy_potential(u_l, gas) + euler.entropy_potential(u_r, gas))
    return np.sum(w_avg * h, axis=-1) - psi_avg


def ec4_entropy_flux(window, gas: GasModel) -> np.ndarray:
    w = np.asarray(window, dtype=float)
    inner = ec2_entropy_flux(w[..., 1, :], w[..., 2, :], gas)
    left = ec2_entropy_flux(w[..., 0, :], w[..., 2, :], gas)
    right = ec2_entropy_flux(w[..., 1, :], w[..., 3, :], gas)
    return (4.0 / 3.0) * inner - (1.0 / 6.0) * (left + right)


def numerical_entropy_flux(kind: str, stencil, gas: GasModel) -> np.ndarray:
    """Dispatch the entropy flux matching flux `kind` on a stencil window.

    For two-point kinds the stencil holds (..., 2, 3); for ec4 (..., 4, 3).
    """
    s = np.asarray(stencil, dtype=float)
    if kind == "llf":
        return llf_entropy_flux(s[..., 0, :], s[..., 1, :], gas)
    if kind == "ec2":
        return ec2_entropy_flux(s[..., 0, :], s[..., 1, :], gas)
    if kind == "ec4":
        return ec4_entropy_flux(s, gas)
    raise ValueError(f"unknown flux kind {kind!r}")


def numerical_flux(kind: str, stencil, gas: GasModel) -> np.ndarray:
    s = np.asarray(stencil, dtype=float)
    if kind == "llf":
        return llf_flux(s[..., 0, :], s[..., 1, :], gas)
    if kind == "ec2":
        return ec_flux2(s[..., 0, :], s[..., 1, :], gas)
    if kind == "ec4":
        return ec_flux4(s, gas)
    raise ValueError(f"unknown flux kind {kind!r}")


def _interface_windows(states: np.ndarray, kind: str, bc: BoundaryKind) -> np.ndarray:
    """Stack the stencil window of every interface: (n+1, 2p, 3)."""
    n = states.shape[0]
    p = STENCIL_HALF_WIDTH[kind]
    up = pad(states, p, bc)
    # interface j sits between cells j-1 and j; its window is cells j-p .. j+p-1
    cols = [up[m : m + n + 1] for m in range(2 * p)]
    return np.stack(cols, axis=1)


def interface_fluxes(states: np.ndarray, kind: str, gas: GasModel, bc: BoundaryKind) -> np.ndarray:
    """Spatial flux sweep: one flux per interface, shape (n+1, 3)."""
    return numerical_flux(kind, _interface_windows(states, kind, bc), gas)


def interface_entropy_fluxes(
    states: np.ndarray, kind: str, gas: GasModel, bc: BoundaryKind
) -> np.ndarray:
    return numerical_entropy_flux(kind, _interface_windows(states, kind, bc), gas)


@dataclass
class QuadratureFluxes:
    """Per-interface time-quadrature flux and its matching entropy flux."""

    flux: np.ndarray          # (n+1, 3)
    entropy_flux: np.ndarray  # (n+1,)
    stage_states: list        # fields the stage fluxes were evaluated at


def rk_quadrature_flux(
    states: np.ndarray,
    kind: str,
    scheme: TimeQuadratureScheme,
    lam: float,
    gas: GasModel,
    bc: BoundaryKind,
) -> QuadratureFluxes:
    """Predictor-corrector flux: quadrature of the interface flux in time.

    Reinterprets an SSP-RK step of the semidiscrete scheme with base flux
    `kind` as a weighted sum of stage fluxes, so a forward-Euler update with
    the returned flux reproduces the full RK update exactly:

    - forward-euler: the base flux itself,
    - ssprk22: (f(u) + f(u1)) / 2 with u1 the Euler predictor,
    - ssprk33: f(u)/6 + f(u1)/6 + 4 f(u2)/6 at the SSP stage states.

    The entropy flux is accumulated with the same weights at the same stage
    states. Raises PositivityError if a predictor stage leaves the admissible
    set ("the base scheme cannot take this step at this CFL").
    """
    scheme = TimeQuadratureScheme.parse(scheme)
    weights = _STAGE_WEIGHTS[scheme]

    def stage_eval(u):
        f = interface_fluxes(u, kind, gas, bc)
        ef = interface_entropy_fluxes(u, kind, gas, bc)
        return f, ef

    def euler_step(u, f):
        u_new = u + lam * (f[:-1] - f[1:])
        ok = euler.is_admissible(u_new, gas)
        if not np.all(ok):
            bad = int(np.argmin(ok))
            raise PositivityError(
                f"{kind} predictor stage inadmissible at cell {bad}", cell=bad
            )
        return u_new

    u0 = np.asarray(states, dtype=float)
    f0, ef0 = stage_eval(u0)
    stages = [u0]
    flux = weights[0] * f0
    eflux = weights[0] * ef0

    if scheme is not TimeQuadratureScheme.FORWARD_EULER:
        u1 = euler_step(u0, f0)
        f1, ef1 = stage_eval(u1)
        stages.append(u1)
        flux = flux + weights[1] * f1
        eflux = eflux + weights[1] * ef1
        if scheme is TimeQuadratureScheme.SSPRK33:
            u2 = 0.75 * u0 + 0.25 * euler_step(u1, f1)
            f2, ef2 = stage_eval(u2)
            stages.append(u2)
            flux = flux + weights[2] * f2
            eflux = eflux + weights[2] * ef2

    return QuadratureFluxes(flux=flux, entropy_flux=eflux, stage_states=stages)


def quadrature_flux_field(
    snapshot: FieldSnapshot,
    kind: str,
    scheme,
    lam: float,
    gas: GasModel,
    bc: BoundaryKind,
) -> QuadratureFluxes:
    """Convenience wrapper taking a FieldSnapshot instead of a raw array."""
    return rk_quadrature_flux(snapshot.states, kind, scheme, lam, gas, bc)
