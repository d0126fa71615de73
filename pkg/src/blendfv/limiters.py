"""Blend-parameter selection from provable physical constraints.

The fully discrete entropy and positivity guarantees both rest on the same
half-cell splitting: the conservative update of cell k is the average of two
"quarter" updates driven by the flux on one interface only,

    u_{k +/- 1/4} = u_k + 2*lam*(+/-)(f(u_k) - flux),

so per-cell inequalities reduce to per-quarter inequalities in which the
blended flux enters linearly. Each limiter here turns those inequalities
into the smallest admissible alpha per interface.
"""

from __future__ import annotations

import numpy as np

from . import euler
from .euler import GasModel
from .mesh import BoundaryKind, CflError, pad

_SIDE_SIGN = {"right": 1.0, "left": -1.0}


def half_cell_production(u_k, flux, eflux, lam, dx, side, gas: GasModel) -> float:
    """Entropy production rate of one quarter-cell update.

    Feeding the dissipative flux/entropy-flux pair yields the rate s (never
    positive under the half CFL bound); the conservative pair yields p, which
    carries either sign. `side` says which interface of cell k the flux
    belongs to. Raises CflError if the inner state left the admissible set.
    """
    sign = _SIDE_SIGN[side]
    u_k = np.asarray(u_k, dtype=float)
    dt = lam * dx
    inner = u_k + 2.0 * lam * sign * (euler.physical_flux(u_k, gas) - np.asarray(flux))
    if not np.all(euler.is_admissible(inner, gas)):
        raise CflError(f"half-cell state on the {side} side is inadmissible")
    pair_k = euler.entropy_pair(u_k, gas)
    U_inner = euler.entropy_pair(inner, gas).U
    return float((U_inner - pair_k.U) / dt + sign * 2.0 * (eflux - pair_k.F) / dx)


def _production_array(u_cells, flux_arr, eflux_arr, lam, dx, side, gas):
    """Vectorized quarter productions; inadmissible inner states become +inf.

    The +inf sentinel encodes "this flux cannot be used at all here", which
    the bound formulas translate into full dissipation (alpha = 1).
    """
    sign = _SIDE_SIGN[side]
    dt = lam * dx
    inner = u_cells + 2.0 * lam * sign * (euler.physical_flux(u_cells, gas) - flux_arr)
    ok = euler.is_admissible(inner, gas)
    out = np.full(u_cells.shape[0], np.inf)
    if np.any(ok):
        pair_k = euler.entropy_pair(u_cells[ok], gas)
        U_inner = euler.entropy_pair(inner[ok], gas)
        out[ok] = (U_inner.U - pair_k.U) / dt + sign * 2.0 * (eflux_arr[ok] - pair_k.F) / dx
    return out


def alpha_condition_f(s: float, p: float) -> float:
    """Smallest alpha in [0, 1] with alpha*s + (1 - alpha)*p <= 0.

    Requires s <= 0 (the dissipative side must not produce entropy); p > 0
    with s = 0 forces full dissipation.
    """
    if s > 0.0:
        raise CflError(f"dissipative production must be non-positive, got s={s}")
    if p <= 0.0:
        return 0.0
    if s == 0.0:
        return 1.0
    return p / (p - s)


def _condition_f_bounds(s, p, p_tol=0.0):
    s = np.asarray(s, dtype=float)
    p = np.asarray(p, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = p / (p - s)
    bound = np.where(p <= p_tol, 0.0, np.where(s < 0.0, ratio, 1.0))
    # p = +inf marks an unusable conservative half state: force alpha = 1
    return np.where(np.isfinite(bound), bound, 1.0)


def alpha_field_condition_f(states, g_arr, h_arr, G_arr, H_arr, lam, dx, gas, bc) -> np.ndarray:
    """Per-interface alpha enforcing the per-cell entropy condition.

    `g_arr`/`G_arr` and `h_arr`/`H_arr` are the per-interface flux and
    entropy-flux arrays of the dissipative and conservative schemes (shape
    (n+1, 3) and (n+1,)). Tiny positive dissipative productions from roundoff
    are clipped to zero; genuinely positive ones raise CflError.

    The baseline demand per interface is the per-quarter bound for both
    adjacent cells. Where a quarter is degenerate (its dissipative
    production is negligible but the conservative one is positive, which
    happens at symmetry-aligned interfaces where the two-point jump
    vanishes while the time quadrature still produces a little entropy),
    the per-quarter condition would force alpha = 1 and destroy the
    convergence order. The fully discrete inequality only needs the
    *weighted sum over each cell's two quarters* to be non-positive, so such
    a quarter's demand is covered by raising the cell's other interface
    instead whenever that quarter has enough dissipation capacity.
    """
    states = np.asarray(states, dtype=float)
    n = states.shape[0]
    up = pad(states, 1, bc)
    left = up[: n + 1]      # cell left of every interface
    right = up[1 : n + 2]   # cell right of every interface

    s_left = _production_array(left, g_arr, G_arr, lam, dx, "right", gas)
    s_right = _production_array(right, g_arr, G_arr, lam, dx, "left", gas)
    p_left = _production_array(left, h_arr, H_arr, lam, dx, "right", gas)
    p_right = _production_array(right, h_arr, H_arr, lam, dx, "left", gas)

    dt = lam * dx
    scale = (np.abs(euler.entropy_pair(up, gas).U).max() + 1.0) / dt
    for s in (s_left, s_right):
        if not np.all(np.isfinite(s)):
            raise CflError("dissipative half-cell state inadmissible; CFL too large")
        if np.any(s > 1e-10 * scale):
            raise CflError("dissipative scheme produced entropy; CFL or flux broken")
        np.minimum(s, 0.0, out=s)

    # conservative productions at roundoff scale are noise, not a demand;
    # the ignored demand bounds the realized per-cell production, so keep it
    # two decades under the 1e-10 * max|U| entropy-inequality tolerance
    U_max = scale * dt - 1.0
    p_tol = 1e-12 * (U_max + 1.0) + 1e-13 * scale

    demand_left = _condition_f_bounds(s_left, p_left, p_tol)
    demand_right = _condition_f_bounds(s_right, p_right, p_tol)

    # cell k owns the "right" quarter of interface k (s_right[k]) and the
    # "left" quarter of interface k+1 (s_left[k+1]); interfaces 1..n-1 have
    # both siblings in range
    for q_s, q_p, q_d, o_s, o_p, o_d, sl in (
        # degenerate left-cell quarter at j covered via interface j-1
        (s_left[1:n], p_left[1:n], demand_left[1:n],
         s_right[0 : n - 1], p_right[0 : n - 1], demand_right[0 : n - 1], None),
        # degenerate right-cell quarter at j covered via interface j+1
        (s_right[1:n], p_right[1:n], demand_right[1:n],
         s_left[2 : n + 1], p_left[2 : n + 1], demand_left[2 : n + 1], None),
    ):
        degenerate = (
            (q_p > p_tol)
            & (np.abs(q_s) <= 1e-3 * np.abs(o_s))
            & (q_p <= -o_s)  # sibling has the capacity to absorb the demand
        )
        if np.any(degenerate):
            with np.errstate(invalid="ignore", divide="ignore"):
                cover = (o_p + q_p) / (o_p - o_s)
            np.copyto(o_d, np.maximum(o_d, np.clip(cover, 0.0, 1.0)), where=degenerate)
            np.copyto(q_d, 0.0, where=degenerate)

    bound = np.maximum(demand_left, demand_right)
    return np.clip(bound, 0.0, 1.0)


def alpha_field_condition_f_cell(states, g_arr, h_arr, G_arr, H_arr, lam, dx, gas, bc) -> np.ndarray:
    """Condition-F alpha from whole-cell scheme productions.

    s_k and p_k are the realized per-cell entropy production rates of the
    pure dissipative and pure conservative schemes (one full update each).
    Unlike the quarter-split productions, the conservative one carries no
    half-cell convexity remainder: it shrinks with the time-integration
    order, so alpha vanishes under refinement in smooth regions and the
    blend keeps the base scheme's convergence order. The price is that the
    fully discrete entropy inequality is enforced through the sufficient
    per-cell bound only, not through the interface-varying quarter argument;
    use the quarter variant where the hard inequality is the contract.
    """
    states = np.asarray(states, dtype=float)
    dt = lam * dx
    U0 = euler.entropy_pair(states, gas).U

    u_g = states + lam * (g_arr[:-1] - g_arr[1:])
    if not np.all(euler.is_admissible(u_g, gas)):
        raise CflError("dissipative scheme update inadmissible; CFL too large")
    s = (euler.entropy_pair(u_g, gas).U - U0) / dt + (G_arr[1:] - G_arr[:-1]) / dx

    u_h = states + lam * (h_arr[:-1] - h_arr[1:])
    ok = euler.is_admissible(u_h, gas)
    p = np.full(states.shape[0], np.inf)
    if np.any(ok):
        p[ok] = (euler.entropy_pair(u_h[ok], gas).U - U0[ok]) / dt + (
            H_arr[1:] - H_arr[:-1]
        )[ok] / dx

    scale = (np.abs(U0).max() + 1.0) / dt
    if np.any(s > 1e-10 * scale):
        raise CflError("dissipative scheme produced entropy; CFL or flux broken")
    np.minimum(s, 0.0, out=s)
    p_tol = 1e-12 * (np.abs(U0).max() + 1.0) + 1e-13 * scale
    cell_alpha = _condition_f_bounds(s, p, p_tol)

    padded = pad(cell_alpha[:, None], 1, bc)[:, 0]
    n = states.shape[0]
    return np.clip(np.maximum(padded[: n + 1], padded[1 : n + 2]), 0.0, 1.0)


# ------------------------------------------------------------- positivity

_FUNCTIONALS = ("neg_density", "neg_pressure")


def _functional(name, u, gas):
    if name == "neg_density":
        return -np.asarray(u, dtype=float)[..., 0]
    if name == "neg_pressure":
        return -euler.raw_pressure(u, gas)
    raise ValueError(f"unknown functional {name!r}")


def alpha_condition_positivity(u_k, g, h, lam, side, functional, gas: GasModel) -> float:
    """Lower alpha bound keeping one convex functional of a half state <= 0.

    The dissipative half state must already satisfy the bound (guaranteed by
    lam * c_max < 0.5); if it does not, that is a CFL violation, not a job
    for the limiter.
    """
    sign = _SIDE_SIGN[side]
    u_k = np.asarray(u_k, dtype=float)
    f_k = euler.physical_flux(u_k, gas)
    state_g = u_k + 2.0 * lam * sign * (f_k - np.asarray(g))
    state_h = u_k + 2.0 * lam * sign * (f_k - np.asarray(h))
    c_g = float(_functional(functional, state_g, gas))
    if c_g > 0.0:
        raise CflError(f"dissipative half state violates {functional}; CFL too large")
    if functional == "neg_pressure" and state_h[0] <= euler.ADMISSIBLE_TOL:
        # -p is only convex where density is positive; without that the
        # endpoint bound proves nothing, so fall back to full dissipation
        return 1.0
    c_h = float(_functional(functional, state_h, gas))
    if c_h <= 0.0:
        return 0.0
    if c_g == 0.0:
        return 1.0
    return min(1.0, c_h / (c_h - c_g))


def _positivity_bounds(u_cells, g_arr, h_arr, lam, side, functional, gas):
    sign = _SIDE_SIGN[side]
    f_k = euler.physical_flux(u_cells, gas)
    state_g = u_cells + 2.0 * lam * sign * (f_k - g_arr)
    state_h = u_cells + 2.0 * lam * sign * (f_k - h_arr)
    c_g = _functional(functional, state_g, gas)
    scale = np.abs(_functional(functional, u_cells, gas)) + 1.0
    if np.any(c_g > 1e-12 * scale):
        raise CflError(f"dissipative half state violates {functional}; CFL too large")
    c_g = np.minimum(c_g, 0.0)
    c_h = _functional(functional, state_h, gas)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = c_h / (c_h - c_g)
    bound = np.where(c_h <= 0.0, 0.0, np.where(c_g < 0.0, ratio, 1.0))
    bound = np.where(np.isfinite(bound), bound, 1.0)
    if functional == "neg_pressure":
        bound = np.where(state_h[..., 0] <= euler.ADMISSIBLE_TOL, 1.0, bound)
    return bound


def alpha_field_positivity(states, g_arr, h_arr, lam, gas, bc) -> np.ndarray:
    """Per-interface alpha = max over both adjacent cells and both
    functionals (negative density, negative pressure) of the positivity
    bounds; one blended forward-Euler step then keeps every cell admissible.
    """
    states = np.asarray(states, dtype=float)
    up = pad(states, 1, bc)
    left = up[: states.shape[0] + 1]
    right = up[1 : states.shape[0] + 2]
    bound = np.zeros(states.shape[0] + 1)
    for functional in _FUNCTIONALS:
        bound = np.maximum(bound, _positivity_bounds(left, g_arr, h_arr, lam, "right", functional, gas))
        bound = np.maximum(bound, _positivity_bounds(right, g_arr, h_arr, lam, "left", functional, gas))
    return np.clip(bound, 0.0, 1.0)


# ---------------------------------------------- Dafermos-style predictor

def smoothstep(x):
    """C^2 ramp: 0 below 0, 6x^5 - 15x^4 + 10x^3 on [0, 1], 1 above."""
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, 0.0, 1.0)
    return xc * xc * xc * (10.0 + xc * (-15.0 + 6.0 * xc))


def cut_hat(x):
    """Hat of height 1: max(0, min(1, 2x + 2, -2x + 2))."""
    x = np.asarray(x, dtype=float)
    return np.maximum(0.0, np.minimum(1.0, np.minimum(2.0 * x + 2.0, -2.0 * x + 2.0)))


def hat_kernel(width: int) -> np.ndarray:
    """Cut-hat sampled on `width` cells at spacing 2/(width+1)."""
    if width < 1 or width % 2 == 0:
        raise ValueError("kernel width must be a positive odd integer")
    r = (width - 1) // 2
    return cut_hat(2.0 * np.arange(-r, r + 1) / (width + 1))


def sup_mollify(values, kernel) -> np.ndarray:
    """Windowed maximum of `values` against `kernel`.

    out_i = max_j values_j * kernel_{i - j + center}; windows are truncated
    at the boundary. With kernel center 1 the output dominates the input.
    """
    values = np.asarray(values, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    if values.size == 0:
        raise ValueError("sup_mollify needs a non-empty input")
    if kernel.ndim != 1 or kernel.size % 2 == 0:
        raise ValueError("kernel must be 1-d with an odd sample count")
    if np.any(kernel < 0.0) or kernel[kernel.size // 2] != 1.0:
        raise ValueError("kernel must be non-negative with peak 1 at its center")
    n = values.size
    center = kernel.size // 2
    out = np.full(n, -np.inf)
    for o in range(-center, center + 1):
        w = kernel[center + o]
        lo, hi = max(0, o), n + min(0, o)
        if hi > lo:
            np.maximum(out[lo:hi], w * values[lo - o : hi - o], out=out[lo:hi])
    return out


def dafermos_predictor(s_field, a=0.1, b=0.4, hat_width=5, bc=BoundaryKind.PERIODIC) -> np.ndarray:
    """Per-interface alpha from per-cell entropy dissipation rates.

    Cells dissipating close to the field's strongest rate s_ref get alpha
    near 1 via the smoothstep of (s_k / s_ref - a) / b; the activation is
    then spread over neighbors by sup-mollification with a sampled cut hat.
    If nothing dissipates (s_ref >= 0) there is nothing to limit.
    """
    if b <= 0.0:
        raise ValueError("threshold width b must be positive")
    s_field = np.asarray(s_field, dtype=float)
    n = s_field.size
    s_ref = float(np.min(s_field))
    if s_ref >= 0.0:
        return np.zeros(n + 1)
    cell_alpha = smoothstep((s_field / s_ref - a) / b)
    kernel = hat_kernel(hat_width)
    if bc is BoundaryKind.PERIODIC:
        # wrap so both copies of the seam interface see the same window
        r = kernel.size // 2
        wrapped = np.concatenate([cell_alpha[-r:], cell_alpha, cell_alpha[:r]]) if r else cell_alpha
        cell_alpha = sup_mollify(wrapped, kernel)[r : r + n]
    else:
        cell_alpha = sup_mollify(cell_alpha, kernel)
    padded = pad(cell_alpha[:, None], 1, bc)[:, 0]
    return np.maximum(padded[: n + 1], padded[1 : n + 2])
