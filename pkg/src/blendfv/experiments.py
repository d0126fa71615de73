"""Benchmark problems, error and convergence machinery, entropy reports.

Two test problems drive everything: the Shu-Osher shock / sine-wave
interaction on [0, 10] and the smooth transport of a density wave under
pressure equilibrium on [0, pi] (periodic, so sin(2x) closes up). Errors are
L1 differences of cell means, with finer references collapsed by repeated
pairwise averaging.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import datagen, euler
from .euler import GasModel, conserved
from .mesh import BoundaryKind, FieldSnapshot, Grid1D
from .schemes import AdvanceConfig, LimiterParams, PRESETS, RunResult, advance

SHU_OSHER_DOMAIN = (0.0, 10.0)
SMOOTH_DOMAIN = (0.0, np.pi)
EPSILON = 0.2


def shu_osher_ic(x):
    """Primitive state of the Shu-Osher problem (test 6): a Mach-3-ish jump
    at x = 1 running into a sine-modulated density field."""
    x = np.asarray(x, dtype=float)
    left = x < 1.0
    rho = np.where(left, 3.857153, 1.0 + EPSILON * np.sin(5.0 * x))
    v = np.where(left, 2.629, 0.0)
    p = np.where(left, 10.333, 1.0)
    return rho, v, p


def smooth_transport_ic(x):
    """Density wave advected at speed 2 under pressure equilibrium."""
    x = np.asarray(x, dtype=float)
    rho = 3.857153 + EPSILON * np.sin(2.0 * x)
    return rho, np.full_like(x, 2.0), np.full_like(x, 10.33333)


def smooth_transport_exact_means(grid: Grid1D, t: float, gas: GasModel) -> np.ndarray:
    """Exact cell means of the transported profile at time t.

    The solution is rho0(x - 2t) with constant v and p; the sine integrates
    in closed form, so the means are exact to roundoff.
    """
    edges = grid.interfaces()
    a, b = edges[:-1] - 2.0 * t, edges[1:] - 2.0 * t
    rho_mean = 3.857153 + EPSILON * (np.cos(2.0 * a) - np.cos(2.0 * b)) / (2.0 * grid.dx)
    return conserved(rho_mean, 2.0, 10.33333, gas)


def initial_snapshot(testcase: str, n_cells: int, gas: GasModel) -> FieldSnapshot:
    if testcase == "shu-osher":
        grid = Grid1D(n_cells, *SHU_OSHER_DOMAIN)
        rho, v, p = shu_osher_ic(grid.centers())
        return FieldSnapshot(grid, 0.0, conserved(rho, v, p, gas))
    if testcase == "smooth-transport":
        grid = Grid1D(n_cells, *SMOOTH_DOMAIN)
        # start from exact means so the spatial order is not capped by the IC
        return FieldSnapshot(grid, 0.0, smooth_transport_exact_means(grid, 0.0, gas))
    raise ValueError(f"unknown testcase {testcase!r}")


def boundary_for(testcase: str) -> BoundaryKind:
    return BoundaryKind.EXTRAPOLATION if testcase == "shu-osher" else BoundaryKind.PERIODIC


# ----------------------------------------------------------------- errors

def downscale(values: np.ndarray) -> np.ndarray:
    """Pairwise means: length-2M cell means collapsed onto M cells."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] % 2:
        raise ValueError("downscale needs an even number of cells")
    return 0.5 * (values[0::2] + values[1::2])


@dataclass(frozen=True)
class L1Error:
    components: np.ndarray
    density: float
    total: float


def l1_error(solution: np.ndarray, reference: np.ndarray, dx: float) -> L1Error:
    """dx * sum |solution - reference| per component.

    The reference may be any power-of-two refinement of the solution grid;
    it is downscaled until the lengths match.
    """
    solution = np.asarray(solution, dtype=float)
    reference = np.asarray(reference, dtype=float)
    while reference.shape[0] > solution.shape[0]:
        if reference.shape[0] % 2:
            raise ValueError("reference length is not a power-of-two multiple")
        reference = downscale(reference)
    if reference.shape != solution.shape:
        raise ValueError("reference does not match the solution grid")
    comp = dx * np.sum(np.abs(solution - reference), axis=0)
    comp = np.atleast_1d(comp)
    return L1Error(components=comp, density=float(comp[0]), total=float(comp.sum()))


def eoc(errors, resolutions):
    """Experimental orders log(e_i/e_{i+1}) / log(N_{i+1}/N_i)."""
    errors = np.asarray(errors, dtype=float)
    res = np.asarray(resolutions, dtype=float)
    if errors.size != res.size or errors.size < 2:
        raise ValueError("need matching errors and resolutions, at least two levels")
    if np.any(errors <= 0.0):
        raise ValueError("errors must be positive")
    return list(np.log(errors[:-1] / errors[1:]) / np.log(res[1:] / res[:-1]))


def total_variation(values: np.ndarray) -> float:
    return float(np.sum(np.abs(np.diff(np.asarray(values, dtype=float)))))


# ------------------------------------------------------------- run helpers

def run_scheme(
    scheme: str,
    testcase: str,
    n_cells: int,
    t_end: float,
    gas: GasModel = GasModel(1.4),
    cfl: float = 0.45,
    limiter_params: LimiterParams | None = None,
    record_blend: bool = True,
    snapshot_every: int = 0,
) -> RunResult:
    """Advance one preset on one benchmark."""
    preset = PRESETS[scheme]
    config = AdvanceConfig(
        preset=preset,
        gas=gas,
        bc=boundary_for(testcase),
        cfl=cfl,
        t_end=t_end,
        limiter_params=limiter_params or LimiterParams(),
        record_blend=record_blend,
        snapshot_every=snapshot_every,
    )
    return advance(config, initial_snapshot(testcase, n_cells, gas))


def reference_shu_osher(
    n_fine: int = 4000, t_end: float = 1.8, gas: GasModel = GasModel(1.4), cfl: float = 0.45
):
    """Fine-grid MUSCL reference of the Shu-Osher run (final snapshot)."""
    traj = datagen.muscl_reference_solve(
        shu_osher_ic,
        n_fine=n_fine,
        t_end=t_end,
        gas=gas,
        bc=BoundaryKind.EXTRAPOLATION,
        cfl=cfl,
        n_samples=1,
        trace_interfaces=np.array([0]),
        x_min=SHU_OSHER_DOMAIN[0],
        x_max=SHU_OSHER_DOMAIN[1],
    )
    grid = Grid1D(n_fine, *SHU_OSHER_DOMAIN)
    return grid, traj.final_states


# -------------------------------------------------------- entropy reports

@dataclass
class EntropyReport:
    productions: np.ndarray  # (steps, n_cells) discrete per-cell rates
    max_production: float
    scale: float             # max |U| over the run
    violation_fraction: float
    tolerance: float


def entropy_production_report(result: RunResult, dx: float, tolerance_factor: float = 1e-8) -> EntropyReport:
    """Discrete per-cell entropy productions of a recorded run.

    production = [U(u^{n+1}) - U(u^n)] / dt + [F_a(k+1/2) - F_a(k-1/2)] / dx
    with the blended numerical entropy flux recorded per step. The summary
    counts entries above tolerance_factor * max|U|.
    """
    if not result.entropy_density or not result.entropy_fluxes:
        raise ValueError("run was not recorded with blend data")
    steps = len(result.entropy_fluxes)
    U = np.asarray(result.entropy_density)
    productions = np.empty((steps, U.shape[1]))
    for m in range(steps):
        F = result.entropy_fluxes[m]
        productions[m] = (U[m + 1] - U[m]) / result.dts[m] + (F[1:] - F[:-1]) / dx
    scale = float(np.max(np.abs(U)))
    tol = tolerance_factor * scale
    frac = float(np.mean(productions > tol))
    return EntropyReport(
        productions=productions,
        max_production=float(np.max(productions)),
        scale=scale,
        violation_fraction=frac,
        tolerance=tol,
    )


# --------------------------------------------------------- convergence run

def convergence_study(
    scheme: str,
    levels,
    t_end: float = 0.5,
    gas: GasModel = GasModel(1.4),
    cfl: float = 0.45,
    limiter_params: LimiterParams | None = None,
):
    """Smooth-transport L1 density errors and EOC over 2**level grids.

    The reference is the exact translated profile (cell means in closed
    form), so no reference-solver noise enters the orders.
    """
    cells = [2**lev for lev in levels]
    errors = []
    for n in cells:
        result = run_scheme(
            "%s" % scheme, "smooth-transport", n, t_end, gas=gas, cfl=cfl,
            limiter_params=limiter_params, record_blend=False,
        )
        exact = smooth_transport_exact_means(result.final.grid, t_end, gas)
        err = l1_error(result.final.states, exact, result.final.grid.dx)
        errors.append(err.density)
    return cells, errors, eoc(errors, cells)
