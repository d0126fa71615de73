"""Polynomial annihilation: jump-function estimators and the PA blend limiter.

A PA operator of order m on an (m+1)-point stencil around an evaluation
point xi annihilates all polynomials of degree < m exactly and returns, after
normalization, an O(h) estimate of the jump [s](xi) = s(xi+) - s(xi-) of the
sensing variable. Away from discontinuities the estimate decays like h^m, so
the normalized magnitude doubles as a smoothness indicator.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .euler import GasModel
from .limiters import sup_mollify
from .mesh import BoundaryKind, pad


@dataclass(frozen=True)
class PAOperator:
    """Annihilation coefficients and normalization for one fixed stencil."""

    points: np.ndarray   # m+1 strictly increasing stencil points
    xi: float            # evaluation point, points[0] <= xi <= points[-1]
    coeffs: np.ndarray   # c_j with sum_j c_j p(x_j) = p^(m)(xi) for deg(p) <= m
    q: float             # sum of c_j over the right half-stencil {x_j >= xi}

    @property
    def order(self) -> int:
        return self.points.size - 1


def annihilation_coefficients(stencil_points, xi: float) -> PAOperator:
    """Solve for the annihilation coefficients of an order-m operator.

    The (m+1) x (m+1) system uses the shifted monomial basis (x - xi)^l for
    conditioning; its right-hand side is the m-th derivative at xi, i.e.
    (0, ..., 0, m!). The normalization q sums the coefficients over the
    points with x_j >= xi and must not vanish.
    """
    pts = np.asarray(stencil_points, dtype=float)
    if pts.ndim != 1 or pts.size < 2:
        raise ValueError("need at least two stencil points (order m >= 1)")
    if np.any(np.diff(pts) <= 0.0):
        raise ValueError("stencil points must be strictly increasing")
    if not pts[0] <= xi <= pts[-1]:
        raise ValueError("evaluation point must lie inside the stencil")
    m = pts.size - 1
    scale = float(np.max(np.diff(pts)))
    y = (pts - xi) / scale
    vander = np.vander(y, m + 1, increasing=True).T  # row l: y**l
    rhs = np.zeros(m + 1)
    rhs[m] = float(factorial(m))
    scaled = np.linalg.solve(vander, rhs)
    coeffs = scaled / scale**m
    q = float(np.sum(coeffs[pts >= xi]))
    if q == 0.0:
        raise ValueError("degenerate stencil: normalization factor q vanished")
    return PAOperator(points=pts, xi=float(xi), coeffs=coeffs, q=q)


def pa_jump(op: PAOperator, samples) -> float:
    """Jump estimate L_m[s](xi) = (1/q) sum_j c_j s(x_j)."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != op.coeffs.size:
        raise ValueError("samples must align with the operator stencil")
    return np.sum(op.coeffs * samples, axis=-1) / op.q


def pa_alpha_field(
    states,
    grid_dx: float,
    domain_measure: float,
    gas: GasModel,
    bc: BoundaryKind = BoundaryKind.PERIODIC,
    p_half: int = 4,
    order: int = 4,
    c1: float = 10.0,
    mollify: bool = True,
) -> np.ndarray:
    """Per-interface blend parameter from PA jump estimates.

    Around interface k+1/2 a window of 2*p_half cells is available; the
    operator of the requested order acts on the centered (order+1)-cell
    sub-stencil with xi at the interface. Sensing runs componentwise on the
    conserved variables, each normalized by the idealized jump of its own
    sub-stencil (operator applied to max/min values split at the interface,
    which evaluates to min - max exactly) plus the field's discrete L1 norm;
    the component maximum is clamped to [0, 1] and finally spread by
    sup-mollification with the kernel max(1 - |x/dx|/3, 0).
    """
    states = np.asarray(states, dtype=float)
    n = states.shape[0]
    if n < 2 * p_half:
        raise ValueError(f"field of {n} cells is smaller than the 2p = {2 * p_half} window")
    if not 1 <= order <= 2 * p_half - 1:
        raise ValueError("operator order must lie in [1, 2*p_half - 1]")

    # centered (order+1)-point sub-stencil of the window, in cell offsets
    # relative to the interface (cell centers at ..., -0.5, +0.5, ... times dx)
    m1 = order + 1
    left_count = (m1 + 1) // 2
    offsets = (np.arange(m1) - left_count + 0.5) * grid_dx
    op = annihilation_coefficients(offsets, 0.0)

    sensing = states
    padded = pad(sensing, left_count, bc)
    # windows[:, m] holds sub-stencil sample m of every interface, (n+1, m1, 3)
    windows = np.stack([padded[m : m + n + 1] for m in range(m1)], axis=1)

    jumps = np.abs(np.einsum("j,ijc->ic", op.coeffs, windows)) / abs(op.q)
    ideal = windows.max(axis=1) - windows.min(axis=1)  # |z| of the idealized step
    c2 = np.sum(np.abs(sensing), axis=0) / n * domain_measure
    denom = ideal + c2[None, :]
    # an identically-zero component has no jump and no norm; it demands nothing
    ratio = np.divide(c1 * jumps, denom, out=np.zeros_like(jumps), where=denom > 0.0)
    alpha = np.max(ratio, axis=1)
    alpha = np.clip(alpha, 0.0, 1.0)
    if mollify:
        kernel = np.maximum(1.0 - np.abs(np.arange(-3, 4)) / 3.0, 0.0)
        alpha = mollify_interface_field(alpha, kernel, bc)
    return alpha


def mollify_interface_field(alpha: np.ndarray, kernel: np.ndarray, bc: BoundaryKind) -> np.ndarray:
    """Sup-mollify an (n+1,)-interface field, wrapping on periodic grids.

    Interfaces 0 and n are the same physical interface on a periodic grid;
    a truncated window there would desynchronize them and break exact
    conservation of the blended flux.
    """
    if bc is not BoundaryKind.PERIODIC:
        return sup_mollify(alpha, kernel)
    core = alpha[:-1]
    r = kernel.size // 2
    wrapped = np.concatenate([core[-r:], core, core[:r]]) if r else core
    out = sup_mollify(wrapped, kernel)[r : r + core.size]
    return np.concatenate([out, out[:1]])
