"""Training-data pipeline: random Fourier initial conditions, a fine-grid
MUSCL reference solver, coarse projection, time-integrated interface fluxes
and least-squares blend targets.

One sample couples the 40-value window around a coarse interface with the
blend parameter whose convex flux best matches the time integral of the
reference flux over one coarse CFL step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import euler, fluxes
from .euler import GasModel, conserved
from .fluxes import TimeQuadratureScheme
from .mesh import BoundaryKind, FieldSnapshot, Grid1D, compute_dt, pad
from .schemes import nn_input_windows

FOURIER_MODES = 100
FOURIER_DECAY = 2.0


@dataclass
class FourierIC:
    """Random trigonometric initial condition on [0, 1].

    Mode amplitudes decay like k^-2 so draws look like C^1 profiles; the
    density and pressure rows are shifted upward so their minima clear a
    small positive floor. The raw shift of the source construction leaves
    the minimum at exactly zero, which stalls the CFL step, hence the floor.
    """

    coeff_sin: np.ndarray  # (3, N) rows: rho, v, p
    coeff_cos: np.ndarray
    v_shift: float
    rho_shift: float = 0.0
    p_shift: float = 0.0

    def primitives(self, x):
        x = np.asarray(x, dtype=float)
        k = np.arange(1, self.coeff_sin.shape[1] + 1)
        phase = 2.0 * np.pi * np.outer(x, k)
        sin, cos = np.sin(phase), np.cos(phase)
        rho = sin @ self.coeff_sin[0] + cos @ self.coeff_cos[0] + self.rho_shift
        v = sin @ self.coeff_sin[1] + cos @ self.coeff_cos[1] + self.v_shift
        p = sin @ self.coeff_sin[2] + cos @ self.coeff_cos[2] + self.p_shift
        return rho, v, p

    def conserved(self, x, gas: GasModel):
        rho, v, p = self.primitives(x)
        return conserved(rho, v, p, gas)


def random_initial_condition(
    rng_or_seed,
    n_modes: int = FOURIER_MODES,
    decay: float = FOURIER_DECAY,
    floor: float = 0.1,
    check_points: int = 4096,
    max_retries: int = 20,
) -> FourierIC:
    """Draw one admissible Fourier initial condition.

    Coefficients are uniform in [0, 1] scaled by k^-decay; the row
    amplitudes (0.2 + A_rho), A_v and (0.3 + A_p) with A_rho, A_v in [0, 2],
    A_p in [0, 4] and the velocity shift B_v in [-2, 2] are redrawn per
    attempt. Density and pressure are shifted so their sampled minima sit at
    `floor` above zero; a draw failing the positivity post-check is rejected.
    """
    rng = np.random.default_rng(rng_or_seed) if not isinstance(rng_or_seed, np.random.Generator) else rng_or_seed
    x_check = (np.arange(check_points) + 0.5) / check_points
    k = np.arange(1, n_modes + 1)
    for _ in range(max_retries):
        a = rng.uniform(0.0, 1.0, size=(3, n_modes)) / k**decay
        b = rng.uniform(0.0, 1.0, size=(3, n_modes)) / k**decay
        amp = np.array([
            0.2 + rng.uniform(0.0, 2.0),
            rng.uniform(0.0, 2.0),
            0.3 + rng.uniform(0.0, 4.0),
        ])
        ic = FourierIC(coeff_sin=amp[:, None] * a, coeff_cos=amp[:, None] * b,
                       v_shift=rng.uniform(-2.0, 2.0))
        rho, _, p = ic.primitives(x_check)
        ic.rho_shift = floor - min(0.0, float(np.min(rho)))
        ic.p_shift = floor - min(0.0, float(np.min(p)))
        rho, _, p = ic.primitives(x_check)
        if np.min(rho) > 0.0 and np.min(p) > 0.0:
            return ic
    raise RuntimeError("could not draw an admissible initial condition")


# ------------------------------------------------------------ MUSCL solver

def _minmod(a, b):
    return np.where(a * b > 0.0, np.where(np.abs(a) < np.abs(b), a, b), 0.0)


def _muscl_interface_fluxes(states, gas, bc):
    """LLF flux on minmod-reconstructed primitive traces, (n+1, 3)."""
    n = states.shape[0]
    prim = np.stack(euler.primitives(states, gas), axis=-1)
    prim_p = pad(prim, 2, bc)
    slope = _minmod(prim_p[1:-1] - prim_p[:-2], prim_p[2:] - prim_p[1:-1])  # cells -1..n
    left_face = prim_p[1:-1] + 0.5 * slope    # value at each cell's right face
    right_face = prim_p[1:-1] - 0.5 * slope   # value at each cell's left face
    # interface j between cells j-1 and j: trace from the left is cell j-1's
    # right face, from the right cell j's left face
    trace_l = left_face[:n + 1]
    trace_r = right_face[1:n + 2]
    # guard: fall back to the cell mean where reconstruction loses positivity
    bad_l = (trace_l[:, 0] <= euler.ADMISSIBLE_TOL) | (trace_l[:, 2] <= euler.ADMISSIBLE_TOL)
    bad_r = (trace_r[:, 0] <= euler.ADMISSIBLE_TOL) | (trace_r[:, 2] <= euler.ADMISSIBLE_TOL)
    if np.any(bad_l):
        trace_l = np.where(bad_l[:, None], prim_p[1:-1][:n + 1], trace_l)
    if np.any(bad_r):
        trace_r = np.where(bad_r[:, None], prim_p[1:-1][1:n + 2], trace_r)
    u_l = conserved(trace_l[:, 0], trace_l[:, 1], trace_l[:, 2], gas)
    u_r = conserved(trace_r[:, 0], trace_r[:, 1], trace_r[:, 2], gas)
    return fluxes.llf_flux(u_l, u_r, gas)


def muscl_step(states, lam, gas, bc):
    """One SSPRK(3,3) step of the MUSCL scheme at mesh ratio lam."""

    def stage(u):
        f = _muscl_interface_fluxes(u, gas, bc)
        return u + lam * (f[:-1] - f[1:])

    u1 = stage(states)
    u2 = 0.75 * states + 0.25 * stage(u1)
    return states / 3.0 + (2.0 / 3.0) * stage(u2)


@dataclass
class ReferenceTrajectory:
    """Fine-grid reference run with interface traces for flux integration."""

    grid: Grid1D
    times: np.ndarray            # (steps + 1,)
    trace_interfaces: np.ndarray  # fine-interface indices carrying traces
    traces: np.ndarray           # (steps + 1, K, 2, 3) states left/right of each
    sample_times: np.ndarray
    sample_states: list          # fine (n, 3) fields at the sample times
    final_states: np.ndarray = None  # field at t_end


def muscl_reference_solve(
    ic,
    n_fine: int = 4000,
    t_end: float = 1.0,
    gas: GasModel = GasModel(1.4),
    bc: BoundaryKind = BoundaryKind.PERIODIC,
    cfl: float = 0.45,
    n_samples: int = 100,
    trace_interfaces=None,
    x_min: float = 0.0,
    x_max: float = 1.0,
) -> ReferenceTrajectory:
    """Second-order MUSCL + SSPRK(3,3) reference run.

    `ic` is either a FourierIC or a callable x -> (rho, v, p). Snapshots are
    stored at `n_samples` equally spaced times in [0, t_end) (steps are
    clipped to land on them exactly); traces of the cells adjacent to the
    requested fine interfaces are stored at every step.
    """
    grid = Grid1D(n_fine, x_min, x_max)
    x = grid.centers()
    if hasattr(ic, "primitives"):
        rho, v, p = ic.primitives(x)
    else:
        rho, v, p = ic(x)
    states = conserved(rho, v, p, gas)
    if not np.all(euler.is_admissible(states, gas)):
        raise ValueError("initial condition is not admissible on the fine grid")

    if trace_interfaces is None:
        trace_interfaces = np.arange(n_fine + 1)
    trace_interfaces = np.asarray(trace_interfaces, dtype=int)
    sample_times = t_end * np.arange(n_samples) / n_samples

    def trace_of(u):
        padded = pad(u, 1, bc)  # cell c sits at padded index c + 1
        return np.stack([padded[trace_interfaces], padded[trace_interfaces + 1]], axis=1)

    times = [0.0]
    traces = [trace_of(states)]
    sample_states = []
    next_sample = 0
    t = 0.0
    while True:
        if next_sample < n_samples and abs(t - sample_times[next_sample]) <= 1e-13 * max(t_end, 1.0):
            sample_states.append(states.copy())
            next_sample += 1
        if t >= t_end - 1e-13 * max(t_end, 1.0):
            break
        dt = compute_dt(FieldSnapshot(grid, t, states), cfl, gas)
        if next_sample < n_samples:
            dt = min(dt, sample_times[next_sample] - t)
        dt = min(dt, t_end - t)
        states = muscl_step(states, dt / grid.dx, gas, bc)
        if not np.all(euler.is_admissible(states, gas)):
            bad = int(np.argmin(euler.is_admissible(states, gas)))
            raise RuntimeError(f"MUSCL reference lost positivity at t={t:.6g}, cell {bad}")
        t = t + dt
        times.append(t)
        traces.append(trace_of(states))
    return ReferenceTrajectory(
        grid=grid,
        times=np.asarray(times),
        trace_interfaces=trace_interfaces,
        traces=np.asarray(traces),
        sample_times=sample_times,
        sample_states=sample_states,
        final_states=states,
    )


def project_to_coarse(fine_states: np.ndarray, ratio: int) -> np.ndarray:
    """Block means of conserved variables; exact integral projection."""
    fine_states = np.asarray(fine_states, dtype=float)
    n = fine_states.shape[0]
    if ratio < 1 or n % ratio:
        raise ValueError("fine cell count must be divisible by the ratio")
    return fine_states.reshape(n // ratio, ratio, -1).mean(axis=1)


def precise_interface_flux(
    traj: ReferenceTrajectory, trace_slot: int, t0: float, t1: float,
    gas: GasModel, rule: str = "midpoint",
) -> np.ndarray:
    """Time average over [t0, t1] of the LLF flux on the stored fine traces.

    Composite rule over the fine solver steps; `midpoint` evaluates the flux
    at the linearly interpolated midpoint state of each overlapped step
    fragment, `trapezoid` averages the endpoint fluxes.
    """
    if t1 <= t0:
        raise ValueError("flux integration needs t1 > t0")
    times = traj.times
    if t0 < times[0] - 1e-12 or t1 > times[-1] + 1e-12:
        raise ValueError("integration interval not covered by the trajectory")
    total = np.zeros(3)
    lo = max(0, int(np.searchsorted(times, t0, side="right")) - 1)
    for m in range(lo, times.size - 1):
        ta, tb = times[m], times[m + 1]
        if ta >= t1:
            break
        a, b = max(ta, t0), min(tb, t1)
        if b <= a:
            continue
        ua, ub = traj.traces[m, trace_slot], traj.traces[m + 1, trace_slot]
        if rule == "midpoint":
            theta = (0.5 * (a + b) - ta) / (tb - ta)
            v = (1.0 - theta) * ua + theta * ub
            f = fluxes.llf_flux(v[0], v[1], gas)
        elif rule == "trapezoid":
            tha = (a - ta) / (tb - ta)
            thb = (b - ta) / (tb - ta)
            va = (1.0 - tha) * ua + tha * ub
            vb = (1.0 - thb) * ua + thb * ub
            f = 0.5 * (fluxes.llf_flux(va[0], va[1], gas) + fluxes.llf_flux(vb[0], vb[1], gas))
        else:
            raise ValueError(f"unknown quadrature rule {rule!r}")
        total += f * (b - a)
    return total / (t1 - t0)


def alpha_target(f_precise, g, h, eps_factor: float = 1e-12) -> float:
    """Least-squares blend parameter via the pseudoinverse projection.

    beta = clamp((h - g) . (f_precise - g) / |h - g|^2) and alpha = 1 - beta;
    a degenerate direction (g = h up to roundoff) selects the most
    dissipative alpha = 1.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    A = h - g
    norm2 = float(A @ A)
    eps = eps_factor * (1.0 + float(np.linalg.norm(g)))
    if np.sqrt(norm2) <= eps:
        return 1.0
    beta = float(A @ (np.asarray(f_precise, dtype=float) - g)) / norm2
    return 1.0 - min(1.0, max(0.0, beta))


# ------------------------------------------------------------ full dataset

@dataclass
class DatasetResult:
    inputs: np.ndarray   # (M, 40)
    targets: np.ndarray  # (M,)
    manifest: dict


def build_dataset(
    n_ics: int = 32,
    coarse_cells: int = 100,
    n_fine: int = 4000,
    t_end: float = 1.0,
    n_samples: int = 100,
    seed: int = 0,
    gas: GasModel = GasModel(1.4),
    cfl: float = 0.45,
    ic_floor: float = 0.1,
    progress=None,
) -> DatasetResult:
    """Generate the full (window, alpha-target) collection.

    For every initial condition, sampling time and coarse interface: project
    the fine snapshot, evaluate the dissipative (LLF, SSPRK22 quadrature) and
    conservative (EC4, SSPRK33 quadrature) fluxes over the coarse CFL step,
    integrate the reference flux over the same interval, and emit the
    clamped least-squares target with the 40-value input window.
    """
    if n_fine % coarse_cells:
        raise ValueError("fine grid must refine the coarse grid by an integer ratio")
    ratio = n_fine // coarse_cells
    rng = np.random.default_rng(seed)
    bc = BoundaryKind.PERIODIC
    coarse_grid = Grid1D(coarse_cells, 0.0, 1.0)
    trace_ifaces = (np.arange(coarse_cells) * ratio) % n_fine  # coarse interface j = fine j*ratio

    all_inputs, all_targets = [], []
    for i in range(n_ics):
        ic = random_initial_condition(rng, floor=ic_floor)
        traj = muscl_reference_solve(
            ic, n_fine=n_fine, t_end=t_end, gas=gas, bc=bc, cfl=cfl,
            n_samples=n_samples, trace_interfaces=trace_ifaces,
        )
        for t_idx, t0 in enumerate(traj.sample_times):
            coarse = project_to_coarse(traj.sample_states[t_idx], ratio)
            snap = FieldSnapshot(coarse_grid, t0, coarse)
            dt_c = compute_dt(snap, cfl, gas)
            dt_c = min(dt_c, traj.times[-1] - t0)
            lam = dt_c / coarse_grid.dx
            qg = fluxes.rk_quadrature_flux(coarse, "llf", TimeQuadratureScheme.SSPRK22, lam, gas, bc)
            qh = fluxes.rk_quadrature_flux(coarse, "ec4", TimeQuadratureScheme.SSPRK33, lam, gas, bc)
            windows = nn_input_windows(coarse, gas, bc)
            for j in range(coarse_cells):  # periodic: interface count = cells
                f_pre = precise_interface_flux(traj, j, t0, t0 + dt_c, gas)
                all_inputs.append(windows[j])
                all_targets.append(alpha_target(f_pre, qg.flux[j], qh.flux[j]))
        if progress is not None:
            progress(i + 1, n_ics)

    manifest = {
        "n_ics": n_ics,
        "coarse_cells": coarse_cells,
        "n_fine": n_fine,
        "t_end": t_end,
        "n_samples": n_samples,
        "seed": seed,
        "cfl": cfl,
        "gamma": gas.gamma,
        "ic_floor": ic_floor,
        "samples": len(all_targets),
        "boundary": "periodic",
        "g_flux": "llf/ssprk22",
        "h_flux": "ec4/ssprk33",
    }
    return DatasetResult(
        inputs=np.asarray(all_inputs), targets=np.asarray(all_targets), manifest=manifest
    )


_CSV_VARS = ("rho", "mom", "E", "p")


def dataset_column_names():
    names = []
    for offset in range(-5, 5):
        tag = f"m{-offset}" if offset < 0 else f"p{offset}"
        names.extend(f"{var}_{tag}" for var in _CSV_VARS)
    names.append("alpha")
    return names


def save_dataset_csv(result: DatasetResult, path, manifest_path=None):
    data = np.concatenate([result.inputs, result.targets[:, None]], axis=1)
    np.savetxt(path, data, delimiter=",", header=",".join(dataset_column_names()), comments="")
    if manifest_path is not None:
        with open(manifest_path, "w") as fh:
            json.dump(result.manifest, fh, indent=2)


def load_dataset_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    return data[:, :-1], data[:, -1]
