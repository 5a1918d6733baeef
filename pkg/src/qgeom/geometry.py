"""Projective-space kinematics of a unitary quantum evolution.

Speed, acceleration, arc length, curvature coefficients, and the physical
bound formulas (QSL times, Caianiello/Pati maximal accelerations, power
loss, jerk bound). Everything internal is computed in hbar=1-style natural
units; SI constants enter only through ``ParticleParams``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateStateError, NumericError, UsageError
from .linalg import expectation
from .propagator import Trajectory

# Below this sigma_H (hbar=1 energy units) the state is eigenstate-like:
# the unitless centered Hamiltonian is undefined and a_H / curvatures are
# reported absent rather than crashing or faking saturation.
EPS_DEG = 1e-9

KAPPA_AC_IMAG_TOL = 1e-8


@dataclass(frozen=True)
class StepObservables:
    """Raw per-time-step quantities feeding both samples and invariant checks.

    The commutator / anticommutator expectations are evaluated from the
    operator products themselves, not reconstructed from <dH dHdot>, so the
    decomposition and realness identities remain genuine runtime checks.
    """

    exp_H: float
    exp_Hdot: float
    sigma_H_sq: float
    sigma_Hdot_sq: float
    cross: complex       # <dH dHdot> (centered operators)
    comm_exp: complex    # <[dH, dHdot]>, purely imaginary in exact arithmetic
    anti_exp: complex    # <{dHdot, dH}>, purely real in exact arithmetic
    degenerate: bool
    a_H: Optional[float]
    kappa_lt: Optional[float]
    dhp_mean: Optional[complex]      # <dh'>, identically zero in exact arithmetic
    dhp_sq: Optional[float]          # <(dh')^2>
    kappa_ac_raw: Optional[complex]  # full curvature sum before taking the real part


def step_observables(H: np.ndarray, Hdot: np.ndarray, psi: np.ndarray,
                     hbar: float = 1.0) -> StepObservables:
    """Evaluate every geometric quantity of a single (H, Hdot, psi) triple."""
    dim = H.shape[0]
    eye = np.eye(dim)
    exp_H = expectation(H, psi)
    exp_Hdot = expectation(Hdot, psi)
    D = H - exp_H * eye
    Dd = Hdot - exp_Hdot * eye
    Dpsi = D @ psi
    Ddpsi = Dd @ psi
    sigma_H_sq = float(np.vdot(Dpsi, Dpsi).real)
    sigma_Hdot_sq = float(np.vdot(Ddpsi, Ddpsi).real)
    cross = complex(np.vdot(Dpsi, Ddpsi))          # <dH dHdot>
    yv = complex(np.vdot(Ddpsi, Dpsi))             # <dHdot dH>
    comm_exp = cross - yv
    anti_exp = cross + yv

    sigma_H = math.sqrt(sigma_H_sq)
    if sigma_H < EPS_DEG:
        return StepObservables(exp_H, exp_Hdot, sigma_H_sq, sigma_Hdot_sq,
                               cross, comm_exp, anti_exp, degenerate=True,
                               a_H=None, kappa_lt=None, dhp_mean=None,
                               dhp_sq=None, kappa_ac_raw=None)

    a_H = anti_exp.real / (2 * sigma_H * hbar)
    v_H = sigma_H / hbar

    K = D / sigma_H                      # unitless centered Hamiltonian dh
    K2 = K @ K
    K2psi = K2 @ psi
    k2 = complex(np.vdot(psi, K2psi))
    k4 = float(np.vdot(K2psi, K2psi).real)   # <((dh)^2)^2> by explicit powers
    kappa_lt = k4 - (k2 ** 2).real

    # dh' = (1/v_H) d/dt dh = dHdot/(hbar v^2) - a_H dH/(hbar v^3)
    P = Dd / (hbar * v_H ** 2) - (a_H / (hbar * v_H ** 3)) * D
    Ppsi = P @ psi
    dhp_mean = complex(np.vdot(psi, Ppsi))
    dhp_sq = float(np.vdot(Ppsi, Ppsi).real)
    comm_kp = complex(np.vdot(psi, K2 @ Ppsi) - np.vdot(psi, P @ K2psi))
    kappa_ac_raw = (k4 - k2 ** 2) + (dhp_sq - dhp_mean ** 2) + 1j * comm_kp

    return StepObservables(exp_H, exp_Hdot, sigma_H_sq, sigma_Hdot_sq,
                           cross, comm_exp, anti_exp, degenerate=False,
                           a_H=a_H, kappa_lt=kappa_lt, dhp_mean=dhp_mean,
                           dhp_sq=dhp_sq, kappa_ac_raw=kappa_ac_raw)


def speed_vH(H: np.ndarray, psi: np.ndarray, hbar: float = 1.0) -> float:
    """Fubini-Study speed sigma_H / hbar."""
    from .linalg import variance
    return math.sqrt(variance(H, psi)) / hbar


def sigma_Hdot(Hdot: np.ndarray, psi: np.ndarray) -> float:
    """Standard deviation of Hdot in the current state."""
    from .linalg import variance
    return math.sqrt(variance(Hdot, psi))


def accel_aH_analytic(H: np.ndarray, Hdot: np.ndarray, psi: np.ndarray,
                      hbar: float = 1.0) -> float:
    """a_H = d/dt v_H = <{dHdot, dH}> / (2 sigma_H hbar). Sign is preserved."""
    obs = step_observables(H, Hdot, psi, hbar)
    if obs.degenerate:
        raise DegenerateStateError(
            f"sigma_H = {math.sqrt(obs.sigma_H_sq):.3e} below degeneracy threshold")
    return obs.a_H


def accel_aH_fd(traj: Trajectory, index: int) -> float:
    """Central-difference oracle for a_H on the trajectory grid."""
    steps = traj.grid.steps
    if not (1 <= index <= steps - 2):
        raise UsageError(f"fd acceleration needs an interior index, got {index}")
    dt = traj.grid.dt
    hbar = traj.schedule.hbar
    times = traj.grid.times()
    sig = []
    for j in (index - 1, index + 1):
        H = traj.schedule.eval_H(times[j])
        from .linalg import variance
        sig.append(math.sqrt(variance(H, traj.states[j])))
    return (sig[1] - sig[0]) / (2 * dt * hbar)


def arc_length(v_H: np.ndarray, dt: float) -> np.ndarray:
    """Cumulative trapezoidal integral of v_H; s[0] = 0 and nondecreasing."""
    v_H = np.asarray(v_H, dtype=float)
    s = np.zeros_like(v_H)
    if v_H.size > 1:
        s[1:] = np.cumsum((v_H[1:] + v_H[:-1]) * (dt / 2))
    return s


def curvature_LT(H: np.ndarray, psi: np.ndarray, hbar: float = 1.0) -> float:
    """Stationary curvature coefficient <(dh)^4> - <(dh)^2>^2."""
    obs = step_observables(H, np.zeros_like(H), psi, hbar)
    if obs.degenerate:
        raise DegenerateStateError("sigma_H below degeneracy threshold")
    return obs.kappa_lt


def curvature_AC(H: np.ndarray, Hdot: np.ndarray, psi: np.ndarray,
                 hbar: float = 1.0) -> float:
    """Nonstationary curvature coefficient (real part of the full sum)."""
    obs = step_observables(H, Hdot, psi, hbar)
    if obs.degenerate:
        raise DegenerateStateError("sigma_H below degeneracy threshold")
    if abs(obs.kappa_ac_raw.imag) >= KAPPA_AC_IMAG_TOL:
        raise NumericError(
            f"curvature sum has imaginary residue {obs.kappa_ac_raw.imag:.3e}")
    return obs.kappa_ac_raw.real


def delta_h_prime_sq_identity(H: np.ndarray, Hdot: np.ndarray, psi: np.ndarray,
                              hbar: float = 1.0) -> tuple[float, float]:
    """(lhs, rhs) of the <(dh')^2> identity.

    lhs is direct operator algebra; rhs is hbar^2 (sigma_Hdot^2 -
    (d/dt sigma_H)^2) / sigma_H^4, computed from independent scalars.
    """
    obs = step_observables(H, Hdot, psi, hbar)
    if obs.degenerate:
        raise DegenerateStateError("sigma_H below degeneracy threshold")
    dsigma_dt = hbar * obs.a_H
    rhs = hbar ** 2 * (obs.sigma_Hdot_sq - dsigma_dt ** 2) / obs.sigma_H_sq ** 2
    return obs.dhp_sq, rhs


def main_bound_slack(H: np.ndarray, Hdot: np.ndarray, psi: np.ndarray,
                     hbar: float = 1.0) -> float:
    """(sigma_Hdot / hbar)^2 - a_H^2; the main bound asserts this >= 0.

    At degenerate points a_H is undefined and taken as 0, so the slack is
    the full dispersion term.
    """
    obs = step_observables(H, Hdot, psi, hbar)
    a_H = 0.0 if obs.degenerate else obs.a_H
    return obs.sigma_Hdot_sq / hbar ** 2 - a_H ** 2


@dataclass(frozen=True)
class QslTimes:
    tau_mt: float
    tau_ml: float
    tau_qsl: float


def qsl_times(delta_E: float, mean_E_minus_E0: float, hbar: float = 1.0) -> QslTimes:
    """Mandelstam-Tamm and Margolus-Levitin times; tau_QSL is their max."""
    if delta_E <= 0 or mean_E_minus_E0 <= 0:
        raise UsageError("qsl_times requires positive energies")
    tau_mt = math.pi * hbar / (2 * delta_E)
    tau_ml = math.pi * hbar / (2 * mean_E_minus_E0)
    return QslTimes(tau_mt, tau_ml, max(tau_mt, tau_ml))


@dataclass(frozen=True)
class ParticleParams:
    """SI-unit particle data for the physical bound formulas."""

    m0: float                       # rest mass, kg
    c: float                        # speed of light, m/s
    hbar: float                     # J s
    delta_x: Optional[float] = None  # position uncertainty, m
    mu: Optional[float] = None       # minimum-uncertainty mass, kg
    lam: Optional[float] = None      # particle linear dimension, m

    def __post_init__(self):
        for name in ("m0", "c", "hbar", "delta_x", "mu", "lam"):
            val = getattr(self, name)
            if val is not None and not (val > 0 and math.isfinite(val)):
                raise UsageError(f"particle parameter {name} must be positive")

    @property
    def compton_wavelength(self) -> float:
        return self.hbar / (self.m0 * self.c)


def caianiello_bounds(p: ParticleParams) -> dict:
    """Maximal-acceleration and power-loss bounds; optional branches absent
    when their inputs are missing."""
    out: dict = {"a_max_1984": 2 * p.m0 * p.c ** 3 / p.hbar}
    if p.mu is not None and p.lam is not None:
        out["a_max_1981"] = (p.mu / p.m0) * (p.c ** 2 / p.lam)
    if p.delta_x is not None:
        a_dx = p.c ** 2 / p.delta_x
        out["a_max_from_dx"] = a_dx
        out["p_max"] = (p.hbar / 2) * a_dx ** 2 / p.c ** 2
    return out


def pati_acceleration_and_jerk(v_H: float, sigma_Hdot_val: float,
                               p: ParticleParams) -> dict:
    """a_max(t) = 2 c v_H and the jerk bound 2 c sigma_Hdot / hbar."""
    if v_H < 0 or sigma_Hdot_val < 0:
        raise UsageError("v_H and sigma_Hdot must be nonnegative")
    return {
        "a_max_t": 2 * p.c * v_H,
        "jerk_bound": 2 * p.c * sigma_Hdot_val / p.hbar,
    }


@dataclass(frozen=True)
class GeometrySample:
    """One grid point of geometric kinematics. Optional fields are absent
    (None) at degenerate points or grid endpoints."""

    t: float
    exp_H: float
    sigma_H: float
    v_H: float
    a_H_analytic: Optional[float]
    a_H_fd: Optional[float]
    sigma_Hdot: float
    s_arc: float
    kappa_LT_sq: Optional[float]
    kappa_AC_sq: Optional[float]
    main_slack: float
    degenerate: bool


def sample_trajectory(traj: Trajectory) -> list[GeometrySample]:
    """One GeometrySample per grid point, with trapezoidal arc length and
    central-difference a_H on interior points."""
    sched = traj.schedule
    hbar = sched.hbar
    times = traj.grid.times()
    dt = traj.grid.dt
    obs = [step_observables(sched.eval_H(t), sched.eval_Hdot(t), traj.states[i], hbar)
           for i, t in enumerate(times)]
    sigma = np.array([math.sqrt(o.sigma_H_sq) for o in obs])
    v = sigma / hbar
    s = arc_length(v, dt)

    samples = []
    n = len(obs)
    for i, o in enumerate(obs):
        a_fd = None
        if 1 <= i <= n - 2:
            a_fd = float(sigma[i + 1] - sigma[i - 1]) / (2 * dt * hbar)
        a_H = None if o.degenerate else o.a_H
        slack = o.sigma_Hdot_sq / hbar ** 2 - (a_H or 0.0) ** 2
        kappa_ac = None
        if o.kappa_ac_raw is not None:
            if abs(o.kappa_ac_raw.imag) >= KAPPA_AC_IMAG_TOL:
                raise NumericError(
                    f"curvature sum imaginary residue {o.kappa_ac_raw.imag:.3e} at t={times[i]}")
            kappa_ac = o.kappa_ac_raw.real
        samples.append(GeometrySample(
            t=float(times[i]), exp_H=o.exp_H, sigma_H=float(sigma[i]),
            v_H=float(v[i]), a_H_analytic=a_H, a_H_fd=a_fd,
            sigma_Hdot=math.sqrt(o.sigma_Hdot_sq), s_arc=float(s[i]),
            kappa_LT_sq=o.kappa_lt, kappa_AC_sq=kappa_ac,
            main_slack=slack, degenerate=o.degenerate))
    return samples


CSV_HEADER = ("t,s,exp_H,sigma_H,v_H,a_H_analytic,a_H_fd,"
              "sigma_Hdot,main_slack,kappa_LT_sq,kappa_AC_sq,degenerate")


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return repr(float(x))


def sample_csv_row(sm: GeometrySample) -> str:
    return ",".join(_cell(v) for v in (
        sm.t, sm.s_arc, sm.exp_H, sm.sigma_H, sm.v_H, sm.a_H_analytic,
        sm.a_H_fd, sm.sigma_Hdot, sm.main_slack, sm.kappa_LT_sq,
        sm.kappa_AC_sq, sm.degenerate))


def samples_to_csv(samples: list[GeometrySample]) -> str:
    lines = [CSV_HEADER]
    lines.extend(sample_csv_row(sm) for sm in samples)
    return "\n".join(lines) + "\n"
