"""Scheme presets and the time-stepping driver.

A scheme couples a dissipative flux g and an entropy-conservative flux h,
each with its own time quadrature, to one strategy for picking the blend
parameter. Five presets are provided:

- delft:    Condition-F entropy bound; g = LLF (forward Euler),
            h = 2-point EC with SSPRK(2,2) quadrature; alpha per step.
- pplft:    positivity bounds max(alpha_rho, alpha_p); g = LLF, h = 4-point
            EC, uniform SSPRK(3,3) with alpha recomputed every substage.
- ddlft:    neural predictor; g = LLF/SSPRK(2,2), h = EC4/SSPRK(3,3).
- palft:    polynomial-annihilation predictor; same fluxes as ddlft.
- dafermos: entropy-rate predictor; same fluxes as ddlft.

Every step produces one effective interface flux (and matching entropy
flux), so the final update is always a single conservative forward-Euler
step regardless of the internal staging.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from . import euler, fluxes, limiters, nn, pa
from .euler import GasModel
from .fluxes import TimeQuadratureScheme
from .mesh import BoundaryKind, FieldSnapshot, compute_dt, conservative_step

# with extrapolation boundaries the widest scheme (EC4 + SSPRK33) reaches 6
# cells; fabricated ghost data must not drive the high-order flux
BOUNDARY_ALPHA_WIDTH = 6


@dataclass(frozen=True)
class SchemePreset:
    """Wiring of one named blending scheme."""

    name: str
    g_kind: str
    g_quad: TimeQuadratureScheme
    h_kind: str
    h_quad: TimeQuadratureScheme
    limiter: str                 # condition_f | positivity | nn | pa | dafermos
    per_stage: bool = False      # recompute alpha in every RK substage

    def stencil_width(self) -> int:
        return max(fluxes.STENCIL_HALF_WIDTH[self.g_kind], fluxes.STENCIL_HALF_WIDTH[self.h_kind])


PRESETS = {
    "delft": SchemePreset(
        "delft", "llf", TimeQuadratureScheme.FORWARD_EULER, "ec2", TimeQuadratureScheme.SSPRK22,
        "condition_f",
    ),
    "pplft": SchemePreset(
        "pplft", "llf", TimeQuadratureScheme.SSPRK33, "ec4", TimeQuadratureScheme.SSPRK33,
        "positivity", per_stage=True,
    ),
    "ddlft": SchemePreset(
        "ddlft", "llf", TimeQuadratureScheme.SSPRK22, "ec4", TimeQuadratureScheme.SSPRK33, "nn",
    ),
    "palft": SchemePreset(
        "palft", "llf", TimeQuadratureScheme.SSPRK22, "ec4", TimeQuadratureScheme.SSPRK33, "pa",
    ),
    "dafermos": SchemePreset(
        "dafermos", "llf", TimeQuadratureScheme.SSPRK22, "ec4", TimeQuadratureScheme.SSPRK33,
        "dafermos",
    ),
}


@dataclass
class LimiterParams:
    """Tunables of the alpha strategies; unused entries are ignored.

    condition_f_granularity picks how the entropy-bound productions are
    split: "cell" uses whole-cell productions of the two pure schemes (the
    accurate choice, keeps second order on smooth data), "quarter" uses the
    half-cell splitting whose per-quarter bounds make the fully discrete
    entropy inequality provable interface by interface at the cost of one
    convergence order.
    """

    nn_model: object = None          # MlpModel for the ddlft preset
    condition_f_granularity: str = "cell"
    pa_half_width: int = 4
    pa_order: int = 4
    pa_c1: float = 10.0
    dafermos_a: float = 0.1
    dafermos_b: float = 0.4
    dafermos_hat_width: int = 5


@dataclass
class AdvanceConfig:
    preset: SchemePreset
    gas: GasModel = GasModel(1.4)
    bc: BoundaryKind = BoundaryKind.PERIODIC
    cfl: float = 0.45
    t_end: float = 1.0
    limiter_params: LimiterParams = field(default_factory=LimiterParams)
    max_steps: int = 2_000_000
    record_blend: bool = True        # per-step alpha, entropy fluxes, U
    record_fluxes: bool = False      # additionally keep g, h, blended flux
    snapshot_every: int = 0          # 0: initial+final only


@dataclass
class InterfaceBlend:
    """Per-interface record of one time step."""

    alpha: np.ndarray
    g: np.ndarray
    h: np.ndarray
    blended: np.ndarray


@dataclass
class RunResult:
    """Trajectory summary returned by advance()."""

    final: FieldSnapshot
    snapshots: list
    times: list
    dts: list
    alphas: list            # per-step (n+1,) blend fields
    entropy_fluxes: list    # per-step (n+1,) blended numerical entropy fluxes
    entropy_density: list   # per-level (n,) U fields, len = steps + 1
    blends: list            # InterfaceBlend records when record_fluxes is set
    step_count: int = 0
    wall_time: float = 0.0


def nn_input_windows(states: np.ndarray, gas: GasModel, bc: BoundaryKind) -> np.ndarray:
    """Assemble the (n+1, 40) network inputs: (rho, mom, E, p) for the five
    cells left and right of every interface, ordered left to right."""
    n = states.shape[0]
    feats = np.concatenate([states, euler.pressure(states, gas)[:, None]], axis=1)
    padded = limiters.pad(feats, 5, bc)
    # interface j: cells j-5 .. j+4 in unpadded indexing = padded j .. j+9
    cols = [padded[m : m + n + 1] for m in range(10)]
    return np.concatenate(cols, axis=1)


def _compute_alpha(preset, params, snapshot, ctx, gas, bc):
    u = snapshot.states
    dx = snapshot.grid.dx
    if preset.limiter == "zero":  # pure high-order flux
        return np.zeros(u.shape[0] + 1)
    if preset.limiter == "one":   # pure dissipative flux
        return np.ones(u.shape[0] + 1)
    if preset.limiter == "condition_f":
        fn = (
            limiters.alpha_field_condition_f
            if params.condition_f_granularity == "quarter"
            else limiters.alpha_field_condition_f_cell
        )
        return fn(u, ctx["g"], ctx["h"], ctx["G"], ctx["H"], ctx["lam"], dx, gas, bc)
    if preset.limiter == "positivity":
        return limiters.alpha_field_positivity(u, ctx["g"], ctx["h"], ctx["lam"], gas, bc)
    if preset.limiter == "nn":
        model = params.nn_model
        if model is None:
            raise ValueError("the ddlft preset needs limiter_params.nn_model")
        return nn.predict_alpha(model, nn_input_windows(u, gas, bc))
    if preset.limiter == "pa":
        measure = snapshot.grid.x_max - snapshot.grid.x_min
        return pa.pa_alpha_field(
            u, dx, measure, gas, bc=bc,
            p_half=params.pa_half_width, order=params.pa_order, c1=params.pa_c1,
        )
    if preset.limiter == "dafermos":
        # entropy rate of the plain LLF forward-Euler scheme, per cell
        lam = ctx["lam"]
        g = fluxes.interface_fluxes(u, "llf", gas, bc)
        G = fluxes.interface_entropy_fluxes(u, "llf", gas, bc)
        u_fe = u + lam * (g[:-1] - g[1:])
        dt = lam * dx
        s_field = (euler.entropy_density(u_fe, gas) - euler.entropy_density(u, gas)) / dt + (
            G[1:] - G[:-1]
        ) / dx
        return limiters.dafermos_predictor(
            s_field, a=params.dafermos_a, b=params.dafermos_b,
            hat_width=params.dafermos_hat_width, bc=bc,
        )
    raise ValueError(f"unknown limiter {preset.limiter!r}")


def _force_boundary_alpha(alpha: np.ndarray, bc: BoundaryKind) -> np.ndarray:
    if bc is BoundaryKind.PERIODIC:
        return alpha
    w = min(BOUNDARY_ALPHA_WIDTH, (alpha.size - 1) // 2)
    alpha = alpha.copy()
    alpha[:w] = 1.0
    alpha[-w:] = 1.0
    return alpha


def step_fluxes(snapshot: FieldSnapshot, dt: float, config: AdvanceConfig):
    """Effective interface fluxes of one step.

    Returns (alpha, f_eff, F_eff, g, h) where a forward-Euler update with
    f_eff reproduces the scheme's full step. Per-step presets evaluate both
    quadrature fluxes once and blend with a single alpha field; the
    per-stage preset runs uniform SSPRK(3,3) with the blend recomputed at
    every stage and accumulates the stage fluxes with the SSP weights. The
    recorded alpha is then the stagewise maximum.
    """
    preset = config.preset
    gas, bc = config.gas, config.bc
    lam = dt / snapshot.grid.dx

    if not preset.per_stage:
        qg = fluxes.rk_quadrature_flux(snapshot.states, preset.g_kind, preset.g_quad, lam, gas, bc)
        qh = fluxes.rk_quadrature_flux(snapshot.states, preset.h_kind, preset.h_quad, lam, gas, bc)
        ctx = {"g": qg.flux, "h": qh.flux, "G": qg.entropy_flux, "H": qh.entropy_flux, "lam": lam}
        alpha = _compute_alpha(preset, config.limiter_params, snapshot, ctx, gas, bc)
        alpha = _force_boundary_alpha(alpha, bc)
        f_eff = fluxes.gt_flux(alpha, qg.flux, qh.flux)
        F_eff = alpha * qg.entropy_flux + (1.0 - alpha) * qh.entropy_flux
        return alpha, f_eff, F_eff, qg.flux, qh.flux

    # uniform SSPRK(3,3), alpha recomputed per substage
    weights = (1.0 / 6.0, 1.0 / 6.0, 4.0 / 6.0)
    u0 = snapshot.states
    stage_u = u0
    f_eff = np.zeros((u0.shape[0] + 1, 3))
    F_eff = np.zeros(u0.shape[0] + 1)
    alpha_max = np.zeros(u0.shape[0] + 1)
    g0 = h0 = None
    for i, w in enumerate(weights):
        g = fluxes.interface_fluxes(stage_u, preset.g_kind, gas, bc)
        h = fluxes.interface_fluxes(stage_u, preset.h_kind, gas, bc)
        G = fluxes.interface_entropy_fluxes(stage_u, preset.g_kind, gas, bc)
        H = fluxes.interface_entropy_fluxes(stage_u, preset.h_kind, gas, bc)
        if i == 0:
            g0, h0 = g, h
        stage_snap = snapshot.with_states(stage_u)
        ctx = {"g": g, "h": h, "G": G, "H": H, "lam": lam}
        alpha = _compute_alpha(preset, config.limiter_params, stage_snap, ctx, gas, bc)
        alpha = _force_boundary_alpha(alpha, bc)
        np.maximum(alpha_max, alpha, out=alpha_max)
        f_stage = fluxes.gt_flux(alpha, g, h)
        f_eff += w * f_stage
        F_eff += w * (alpha * G + (1.0 - alpha) * H)
        if i == 0:
            stage_u = u0 + lam * (f_stage[:-1] - f_stage[1:])
        elif i == 1:
            stage_u = 0.75 * u0 + 0.25 * (stage_u + lam * (f_stage[:-1] - f_stage[1:]))
    return alpha_max, f_eff, F_eff, g0, h0


def advance(config: AdvanceConfig, ic: FieldSnapshot) -> RunResult:
    """March the blended scheme from `ic` to config.t_end.

    Each step: pick dt from the CFL bound (clipping the final step so the
    end time is hit exactly), compute the blend field per the preset's
    limiter, build the effective quadrature fluxes, and apply one
    conservative update. Positivity and CFL failures propagate as
    exceptions carrying the offending cell where known.
    """
    started = _time.perf_counter()
    result = RunResult(
        final=ic, snapshots=[ic], times=[ic.time], dts=[], alphas=[], entropy_fluxes=[],
        entropy_density=[], blends=[],
    )
    if config.record_blend:
        result.entropy_density.append(euler.entropy_density(ic.states, config.gas))
    current = ic
    remaining = config.t_end - ic.time
    if remaining < 0:
        raise ValueError("t_end lies before the initial time")
    steps = 0
    while remaining > 0:
        if steps >= config.max_steps:
            raise RuntimeError(f"step budget of {config.max_steps} exhausted")
        dt = compute_dt(current, config.cfl, config.gas)
        clipped = dt >= remaining
        if clipped:
            dt = remaining
        alpha, f_eff, F_eff, g, h = step_fluxes(current, dt, config)
        current = conservative_step(current, f_eff, dt, config.gas)
        if clipped:
            # pin the final time exactly; accumulated roundoff must not
            # spawn a spurious ulp-sized extra step
            current = FieldSnapshot(current.grid, config.t_end, current.states)
        steps += 1
        remaining = config.t_end - current.time
        result.times.append(current.time)
        result.dts.append(dt)
        if config.record_blend:
            result.alphas.append(alpha)
            result.entropy_fluxes.append(F_eff)
            result.entropy_density.append(euler.entropy_density(current.states, config.gas))
        if config.record_fluxes:
            result.blends.append(InterfaceBlend(alpha=alpha, g=g, h=h, blended=f_eff))
        if config.snapshot_every and steps % config.snapshot_every == 0:
            result.snapshots.append(current)
    if result.snapshots[-1] is not current:
        result.snapshots.append(current)
    result.final = current
    result.step_count = steps
    result.wall_time = _time.perf_counter() - started
    return result
