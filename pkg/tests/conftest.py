import numpy as np
import pytest

from blendfv.euler import GasModel, conserved

GAS = GasModel(1.4)


@pytest.fixture(scope="session")
def gas():
    return GAS


def random_states(rng, n, rho_range=(0.1, 5.0), v_range=(-3.0, 3.0), p_range=(0.1, 10.0)):
    """Batch of random admissible conserved states, shape (n, 3)."""
    rho = rng.uniform(*rho_range, size=n)
    v = rng.uniform(*v_range, size=n)
    p = rng.uniform(*p_range, size=n)
    return conserved(rho, v, p, GAS)


def smooth_periodic_field(n, x_min=0.0, x_max=1.0):
    """Smooth admissible field on a periodic grid, handy for sweeps."""
    x = x_min + (np.arange(n) + 0.5) * (x_max - x_min) / n
    span = x_max - x_min
    rho = 2.0 + 0.5 * np.sin(2 * np.pi * (x - x_min) / span)
    v = 0.3 + 0.2 * np.cos(2 * np.pi * (x - x_min) / span)
    p = 1.5 + 0.4 * np.sin(4 * np.pi * (x - x_min) / span)
    return conserved(rho, v, p, GAS)
