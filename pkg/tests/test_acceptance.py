"""Acceptance gate: every top-level numerical contract of the package,
each reported as a single PASS/FAIL line on the terminal.

The campaign here is the expensive part (10^4 trials, single-threaded);
it is computed once and shared by the criteria that read from it.
"""

import math
import time

import numpy as np
import pytest

from qgeom.geometry import (EPS_DEG, ParticleParams, caianiello_bounds,
                            curvature_LT, sample_trajectory, step_observables)
from qgeom.linalg import pauli_dot, random_hermitian
from qgeom.propagator import propagate
from qgeom.qubit import (aH_closed, energy_loss_rate, integrate_bloch,
                         state_from_bloch, vH_closed)
from qgeom.schedules import (FixedAxisField, FourierField, FourierSchedule,
                             QubitFieldSchedule, RotatingField, TimeGrid)
from qgeom.verify import run_campaign

CAMPAIGN_TRIALS = 10 ** 4
CAMPAIGN_SEED = 20260823
CAMPAIGN_DIMS = (2, 3, 4, 8)
CAMPAIGN_FAMILIES = ("constant", "fourier", "fixed_axis", "rotating_field")
RUNTIME_BUDGET_S = 300.0


def emit(capsys, ok, name, detail):
    with capsys.disabled():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="session")
def campaign():
    t0 = time.time()
    report = run_campaign(CAMPAIGN_TRIALS, CAMPAIGN_SEED,
                          list(CAMPAIGN_DIMS), list(CAMPAIGN_FAMILIES),
                          max_workers=1)
    return report, time.time() - t0


def test_main_bound_campaign(campaign, capsys):
    report, elapsed = campaign
    s = report["summary"]
    n_main = s["violations_by_check"]["main_bound"]
    ok = (n_main == 0 and s["min_main_slack"] >= -1e-9
          and elapsed < RUNTIME_BUDGET_S)
    emit(capsys, ok, "main bound campaign",
         f"{CAMPAIGN_TRIALS} trials dims {CAMPAIGN_DIMS}, "
         f"{n_main} violations, min slack {s['min_main_slack']:.3e}, "
         f"{elapsed:.1f}s single-threaded (budget {RUNTIME_BUDGET_S:.0f}s)")


def test_saturation_fixed_axis(capsys):
    sched = QubitFieldSchedule(FixedAxisField(np.array([0.0, 0.0, 1.0]), 0.5))
    traj = propagate(sched, state_from_bloch([1.0, 0.0, 0.0]),
                     TimeGrid(0.0, 2.0, 2001))
    samples = sample_trajectory(traj)
    max_a_dev = max(abs(sm.a_H_analytic - 0.5) for sm in samples)
    max_slack = max(abs(sm.main_slack) for sm in samples)
    ok = max_a_dev <= 1e-6 and max_slack <= 1e-9
    emit(capsys, ok, "saturation",
         f"2001 points on [0,2]: max |a_H - 0.5| = {max_a_dev:.3e} (<= 1e-6), "
         f"max |slack| = {max_slack:.3e} (<= 1e-9)")


def test_proof_chain_identities(campaign, capsys):
    report, _ = campaign
    r = report["summary"]["residuals"]
    checks = [
        ("schwarz", r["schwarz"] >= -1e-10, f"min slack {r['schwarz']:.3e} >= -1e-10"),
        ("decomposition", r["decomposition"] <= 1e-9,
         f"max rel residual {r['decomposition']:.3e} <= 1e-9"),
        ("comm_real", r["comm_real"] <= 1e-10,
         f"max |Re| {r['comm_real']:.3e} <= 1e-10"),
        ("love2_fd", r["love2_fd"] <= 5.0,
         f"max FD residual / dt^2 = {r['love2_fd']:.3f} <= 5"),
    ]
    ok = all(c[1] for c in checks)
    emit(capsys, ok, "proof-chain identities",
         "; ".join(f"{name}: {msg}" for name, _, msg in checks))


def test_curvature_identities(campaign, capsys):
    report, _ = campaign
    r = report["summary"]["residuals"]
    psi = state_from_bloch([1.0, 0.0, 0.0])
    k_lt_perp = abs(curvature_LT(pauli_dot([0.0, 0.0, 1.0]), psi))
    checks = [
        ("ac1", r["ac1_identity"] <= 1e-8, f"{r['ac1_identity']:.3e} <= 1e-8"),
        ("stationary reduction", r["stationary_reduction"] <= 1e-9,
         f"{r['stationary_reduction']:.3e} <= 1e-9"),
        ("perpendicular kappa_LT", k_lt_perp <= 1e-8, f"{k_lt_perp:.3e} <= 1e-8"),
        ("<dh'>", r["dhp_mean"] <= 1e-8, f"{r['dhp_mean']:.3e} <= 1e-8"),
    ]
    ok = all(c[1] for c in checks)
    emit(capsys, ok, "curvature identities",
         "; ".join(f"{name}: {msg}" for name, _, msg in checks))


def _dual_path_deviation(fld, a0):
    grid = TimeGrid(0.0, 2.0, 2001)  # dt = 1e-3 over [0, 2]
    sched = QubitFieldSchedule(fld)
    a0 = np.asarray(a0, dtype=float)
    a0 = a0 / np.linalg.norm(a0)
    bloch = integrate_bloch(fld, a0, grid)
    traj = propagate(sched, state_from_bloch(a0), grid)
    worst = 0.0
    for i, t in enumerate(grid.times()):
        a = bloch[i]
        m = fld.m(t)
        md = fld.mdot(t)
        o = step_observables(sched.eval_H(t), sched.eval_Hdot(t),
                             traj.states[i], 1.0)
        dev = abs(vH_closed(a, m) - math.sqrt(o.sigma_H_sq))
        dev = max(dev, abs(energy_loss_rate(a, md) - o.exp_Hdot))
        dev = max(dev, abs(float(a @ m) - o.exp_H))
        sig_cl = math.sqrt(max(float(md @ md) - float(a @ md) ** 2, 0.0))
        dev = max(dev, abs(sig_cl - math.sqrt(o.sigma_Hdot_sq)))
        if not o.degenerate and vH_closed(a, m) >= EPS_DEG:
            dev = max(dev, abs(aH_closed(a, m, md) - o.a_H))
        worst = max(worst, dev)
    return worst


def test_dual_path_consistency(capsys):
    cases = {
        "fixed_axis": (FixedAxisField(np.array([0.0, 0.0, 1.0]), 0.5), [1, 0, 0]),
        "rotating_field": (RotatingField(1.0, 2.0), [0, 0, 1]),
        "custom_fourier": (FourierField(np.array([0.1, 0.0, 0.3]),
                                        ((np.array([0.2, 0.0, 0.0]),
                                          np.array([0.0, 0.2, 0.0]), 1.5),)),
                           [1, 0, 0]),
    }
    devs = {name: _dual_path_deviation(fld, a0) for name, (fld, a0) in cases.items()}
    ok = all(d <= 1e-6 for d in devs.values())
    emit(capsys, ok, "dual-path consistency",
         "[0,2] at dt=1e-3: " + ", ".join(f"{k}={v:.3e}" for k, v in devs.items())
         + " (all <= 1e-6)")


def test_physical_constants(capsys):
    # CODATA 2018, written here independently of the package's preset
    m0, c, hbar = 9.1093837015e-31, 2.99792458e8, 1.054571817e-34
    p = ParticleParams(m0=m0, c=c, hbar=hbar)
    oracle = 2 * m0 * c ** 3 / hbar
    got = caianiello_bounds(p)["a_max_1984"]
    rel = abs(got - oracle) / oracle
    out = caianiello_bounds(ParticleParams(m0=m0, c=c, hbar=hbar,
                                           delta_x=p.compton_wavelength / 2))
    exact = out["a_max_from_dx"] == out["a_max_1984"]
    ok = rel <= 1e-6 and exact
    emit(capsys, ok, "physical constants",
         f"electron a_max = {got:.4e} m/s^2, rel dev {rel:.1e} <= 1e-6; "
         f"half-Compton identity exact: {exact}")


def test_propagator_order(capsys):
    rng = np.random.default_rng(61)
    sched = FourierSchedule(random_hermitian(3, 0.5, rng),
                            ((random_hermitian(3, 0.5, rng),
                              random_hermitian(3, 0.5, rng), 2.0),))
    from qgeom.linalg import random_state
    psi0 = random_state(3, rng)
    ref = propagate(sched, psi0, TimeGrid(0.0, 1.0, 8001)).states[-1]
    dts, errs = [], []
    for dt in (4e-3, 2e-3, 1e-3):
        steps = round(1.0 / dt) + 1
        end = propagate(sched, psi0, TimeGrid(0.0, 1.0, steps)).states[-1]
        dts.append(dt)
        errs.append(np.linalg.norm(end - ref))
    slope = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    ok = slope >= 1.9
    emit(capsys, ok, "propagator order",
         f"self-convergence exponent {slope:.3f} >= 1.9 "
         f"across dt in {{4e-3, 2e-3, 1e-3}}")
