"""Closed-form spin-1/2 specialization on the Bloch sphere.

The Bloch path (RK4 on adot = 2 m x a, plus closed-form kinematics in
terms of a, m, mdot) is kept fully independent of the operator path
(eigendecomposition-based propagation of H = m . sigma), so agreement of
the two is a strong dual-route consistency check.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateStateError, UsageError
from .geometry import EPS_DEG
from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, as_state, expectation
from .schedules import MagneticField, TimeGrid


def bloch_from_state(psi: np.ndarray) -> np.ndarray:
    """Bloch vector (<sigma_x>, <sigma_y>, <sigma_z>) of a qubit pure state."""
    psi = as_state(psi)
    if psi.shape[0] != 2:
        raise UsageError("bloch_from_state requires a qubit (dim 2) state")
    return np.array([expectation(SIGMA_X, psi),
                     expectation(SIGMA_Y, psi),
                     expectation(SIGMA_Z, psi)])


def state_from_bloch(a) -> np.ndarray:
    """A pure state with the given unit Bloch vector (global phase arbitrary)."""
    a = np.asarray(a, dtype=float).reshape(3)
    norm = np.linalg.norm(a)
    if norm < 1e-12:
        raise UsageError("cannot build a pure state from a zero Bloch vector")
    a = a / norm
    theta = math.acos(np.clip(a[2], -1.0, 1.0))
    phi = math.atan2(a[1], a[0])
    return np.array([math.cos(theta / 2),
                     complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2)])


def bloch_rhs(a, m) -> np.ndarray:
    """adot = 2 (m x a); orthogonal to both m and a."""
    return 2.0 * np.cross(np.asarray(m, dtype=float), np.asarray(a, dtype=float))


def integrate_bloch(fld: MagneticField, a0, grid: TimeGrid) -> np.ndarray:
    """Classical RK4 on adot = 2 m(t) x a with per-step renormalization.

    Returns an array of shape (steps, 3).
    """
    a = np.asarray(a0, dtype=float).reshape(3)
    norm = np.linalg.norm(a)
    if abs(norm - 1.0) > 1e-10:
        raise UsageError(f"initial Bloch vector norm {norm} != 1")
    a = a / norm
    dt = grid.dt
    out = np.empty((grid.steps, 3))
    out[0] = a
    t = grid.t0
    for i in range(1, grid.steps):
        k1 = bloch_rhs(a, fld.m(t))
        k2 = bloch_rhs(a + dt / 2 * k1, fld.m(t + dt / 2))
        k3 = bloch_rhs(a + dt / 2 * k2, fld.m(t + dt / 2))
        k4 = bloch_rhs(a + dt * k3, fld.m(t + dt))
        a = a + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        a = a / np.linalg.norm(a)
        out[i] = a
        t += dt
    return out


def vH_closed(a, m) -> float:
    """v_H = sqrt(m^2 - (a.m)^2), clamped at 0 against rounding."""
    a = np.asarray(a, dtype=float)
    m = np.asarray(m, dtype=float)
    val = float(m @ m - (a @ m) ** 2)
    return math.sqrt(max(val, 0.0))


def aH_closed(a, m, mdot) -> float:
    """a_H = [m.mdot - (a.m)(a.mdot)] / v_H."""
    a = np.asarray(a, dtype=float)
    m = np.asarray(m, dtype=float)
    mdot = np.asarray(mdot, dtype=float)
    v = vH_closed(a, m)
    if v < EPS_DEG:
        raise DegenerateStateError("a parallel to m: v_H below degeneracy threshold")
    return float(m @ mdot - (a @ m) * (a @ mdot)) / v


def energy_loss_rate(a, mdot) -> float:
    """<Hdot> = a . mdot; vanishes whenever a is perpendicular to mdot."""
    return float(np.asarray(a, dtype=float) @ np.asarray(mdot, dtype=float))


def qubit_bound_report(a, m, mdot) -> dict:
    """Both geometric forms of the main bound for a (a, m, mdot) triple.

    lhs <= rhs is the bound itself; lagrange_lhs >= lagrange_rhs is its
    equivalent cross-product form, with equality iff triple = a.(m x mdot)
    vanishes.
    """
    a = np.asarray(a, dtype=float)
    m = np.asarray(m, dtype=float)
    mdot = np.asarray(mdot, dtype=float)
    v = vH_closed(a, m)
    lhs = 0.0 if v < EPS_DEG else aH_closed(a, m, mdot) ** 2
    rhs = float(mdot @ mdot - (a @ mdot) ** 2)
    mxmd = np.cross(m, mdot)
    triple = float(a @ mxmd)
    lagrange_lhs = float(mxmd @ mxmd)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "lagrange_lhs": lagrange_lhs,
        "lagrange_rhs": lagrange_lhs - triple ** 2,
        "triple": triple,
    }
