"""Uniform 1D grid, field snapshots, boundary padding and the conservative update."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from . import euler
from .euler import GasModel


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    EXTRAPOLATION = "extrapolation"

    @classmethod
    def parse(cls, name) -> "BoundaryKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown boundary kind {name!r}") from None


class PositivityError(RuntimeError):
    """A tentative or updated state lost positive density or pressure."""

    def __init__(self, message, cell=None, time=None):
        super().__init__(message)
        self.cell = cell
        self.time = time


class CflError(RuntimeError):
    """A limiter precondition that the CFL bound should guarantee failed."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh on [x_min, x_max] with n_cells cells."""

    n_cells: int
    x_min: float = 0.0
    x_max: float = 1.0

    def __post_init__(self):
        if self.n_cells < 1 or not self.x_max > self.x_min:
            raise ValueError("grid needs n_cells >= 1 and x_max > x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def interfaces(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_cells + 1) * self.dx


@dataclass
class FieldSnapshot:
    """All cell means at one time level: states has shape (n_cells, 3)."""

    grid: Grid1D
    time: float
    states: np.ndarray

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float)
        if self.states.shape != (self.grid.n_cells, 3):
            raise ValueError(
                f"states shape {self.states.shape} does not match grid "
                f"({self.grid.n_cells} cells)"
            )

    def with_states(self, states, time=None) -> "FieldSnapshot":
        return FieldSnapshot(self.grid, self.time if time is None else time, states)


def pad(states: np.ndarray, width: int, bc: BoundaryKind) -> np.ndarray:
    """Extend a (n, 3) state array by `width` ghost cells on each side."""
    if width == 0:
        return states
    if bc is BoundaryKind.PERIODIC:
        return np.concatenate([states[-width:], states, states[:width]], axis=0)
    # zeroth-order extrapolation: ghosts copy the boundary cell
    return np.concatenate(
        [np.repeat(states[:1], width, axis=0), states, np.repeat(states[-1:], width, axis=0)],
        axis=0,
    )


def compute_dt(snapshot: FieldSnapshot, cfl_factor: float, gas: GasModel) -> float:
    """CFL time step dt = cfl_factor * dx / max wave speed.

    The factor must stay below 0.5: the blended scheme's half-cell splitting
    doubles the effective mesh ratio, so lam * c_max < 0.5 is the stability
    and positivity requirement.
    """
    if not 0.0 < cfl_factor < 0.5:
        raise ValueError(f"cfl_factor must lie in (0, 0.5), got {cfl_factor}")
    if snapshot.grid.n_cells == 0:
        raise ValueError("empty field")
    c_max = float(np.max(euler.max_wave_speed(snapshot.states, gas)))
    return cfl_factor * snapshot.grid.dx / c_max


def conservative_step(
    snapshot: FieldSnapshot, interface_fluxes: np.ndarray, dt: float, gas: GasModel
) -> FieldSnapshot:
    """One conservative update u_k += (dt/dx) * (f_{k-1/2} - f_{k+1/2}).

    `interface_fluxes` must hold n_cells + 1 rows, boundary fluxes included.
    Raises PositivityError (with the first offending cell) if any updated
    state is inadmissible.
    """
    n = snapshot.grid.n_cells
    f = np.asarray(interface_fluxes, dtype=float)
    if f.shape != (n + 1, 3):
        raise ValueError(f"expected {(n + 1, 3)} interface fluxes, got {f.shape}")
    lam = dt / snapshot.grid.dx
    new_states = snapshot.states + lam * (f[:-1] - f[1:])
    ok = euler.is_admissible(new_states, gas)
    if not np.all(ok):
        bad = int(np.argmin(ok))
        raise PositivityError(
            f"cell {bad} inadmissible after update at t={snapshot.time:.6g}",
            cell=bad,
            time=snapshot.time,
        )
    return FieldSnapshot(snapshot.grid, snapshot.time + dt, new_states)
