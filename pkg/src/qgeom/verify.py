"""Randomized ensemble runner for the full inequality chain.

Each trial draws a random schedule and initial state, propagates, and
evaluates every runtime invariant of the geometry module (plus the qubit
dual-path checks at dim 2). Residuals are aggregated into a deterministic
JSON report; any residual beyond its documented tolerance is a violation
and carries a replayable payload.
"""

from __future__ import annotations

import json
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .errors import UsageError
from .geometry import EPS_DEG, step_observables
from .linalg import as_state, random_hermitian, random_state, variance, commutator
from .propagator import propagate
from .qubit import (aH_closed, bloch_from_state, energy_loss_rate,
                    integrate_bloch, state_from_bloch, vH_closed)
from .schedules import (ConstantSchedule, FixedAxisField, FourierSchedule,
                        HamiltonianSchedule, QubitFieldSchedule, RotatingField,
                        TimeGrid, schedule_from_dict, schedule_to_dict)

# One table of tolerances; the report header carries it so every inequality
# of the chain stays tolerance-annotated in output.
#
# Sign conventions: *_slack residuals are minima and must stay >= -tol;
# all other residuals are maxima of absolute deviations and must stay <= tol.
TOLERANCES = {
    "main_bound": 1e-9,            # min slack sigma_Hdot^2 - a_H^2
    "schwarz": 1e-10,              # min slack sig_Hdot^2 sig_H^2 - |<dH dHdot>|^2
    "decomposition": 1e-9,         # relative modulus-decomposition residual
    "comm_real": 1e-10,            # |Re <[dH, dHdot]>|
    "anti_imag": 1e-10,            # |Im <{dHdot, dH}>|
    "dhp_mean": 1e-8,              # |<dh'>|
    "ac1_identity": 1e-8,          # |lhs - rhs| of the <(dh')^2> identity
    "kappa_ac_imag": 1e-8,         # imaginary residue of the curvature sum
    "love2_fd": 5.0,               # |fd of sigma_H^2 - <{dHdot,dH}>| / dt^2
    "uncertainty": 1e-10,          # min slack varA varB - |<[A,B]>|^2 / 4
    "stationary_reduction": 1e-9,  # |kappa_AC - kappa_LT| on constant family
    "dual_path": 1e-6,             # Bloch vs operator path, at reference dt
    "bloch_norm": 1e-8,            # |  ||a|| - 1 | along Bloch integration
}

# kappa_AC positivity is monitored (reported), never asserted.
KAPPA_AC_MONITOR_FLOOR = -1e-8

SLACK_CHECKS = {"main_bound", "schwarz", "uncertainty"}

FAMILIES = ("constant", "fourier", "fixed_axis", "rotating_field")
QUBIT_FAMILIES = ("fixed_axis", "rotating_field")


@dataclass(frozen=True)
class TrialSpec:
    dim: int
    family: str
    seed: int
    grid: TimeGrid
    ensemble_scale: float = 0.15

    def __post_init__(self):
        if not (2 <= self.dim <= 16):
            raise UsageError(f"trial dim must be in [2, 16], got {self.dim}")
        if not (11 <= self.grid.steps <= 100001):
            raise UsageError(f"trial steps must be in [11, 100001], got {self.grid.steps}")
        if self.family not in FAMILIES:
            raise UsageError(f"unknown trial family {self.family!r}")
        if self.family in QUBIT_FAMILIES and self.dim != 2:
            raise UsageError(f"family {self.family} requires dim 2")
        if self.seed < 0:
            raise UsageError("seed must be a nonnegative integer")


@dataclass
class TrialReport:
    spec: TrialSpec
    residuals: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)
    violation_records: list = field(default_factory=list)
    min_kappa_ac: Optional[float] = None
    degenerate_steps: int = 0

    def to_dict(self) -> dict:
        return {
            "seed": self.spec.seed,
            "dim": self.spec.dim,
            "family": self.spec.family,
            "residuals": {k: self.residuals.get(k) for k in TOLERANCES},
            "violations": {k: self.violations.get(k, 0) for k in TOLERANCES},
            "min_kappa_ac": self.min_kappa_ac,
            "degenerate_steps": self.degenerate_steps,
        }


def _draw_trial(spec: TrialSpec, rng):
    """One random (schedule, initial state) draw for a trial family.

    Random matrices are drawn at ensemble_scale / sqrt(dim) so the operator
    norm of H stays comparable across dimensions.
    """
    scale = spec.ensemble_scale / np.sqrt(spec.dim)
    if spec.family == "constant":
        sched: HamiltonianSchedule = ConstantSchedule(random_hermitian(spec.dim, scale, rng))
        psi0 = random_state(spec.dim, rng)
    elif spec.family == "fourier":
        A = random_hermitian(spec.dim, scale, rng)
        B = random_hermitian(spec.dim, scale, rng)
        C = random_hermitian(spec.dim, scale, rng)
        omega = float(rng.uniform(0.1, 5.0))
        sched = FourierSchedule(A, ((B, C, omega),))
        psi0 = random_state(spec.dim, rng)
    elif spec.family == "fixed_axis":
        axis = rng.standard_normal(3)
        axis /= np.linalg.norm(axis)
        intensity = float(rng.uniform(0.5, 1.5)) * scale
        m0 = axis * intensity
        # Keep the intensity bounded away from zero over the grid so the
        # trial never drifts into the degenerate regime.
        duration = spec.grid.t1 - spec.grid.t0
        alpha = float(rng.uniform(-0.6, 0.6)) * intensity / max(duration, 1e-12)
        sched = QubitFieldSchedule(FixedAxisField(m0, alpha))
        # Saturating configuration: start perpendicular to the field axis.
        perp = np.cross(axis, rng.standard_normal(3))
        while np.linalg.norm(perp) < 1e-8:  # pragma: no cover - measure zero
            perp = np.cross(axis, rng.standard_normal(3))
        psi0 = state_from_bloch(perp / np.linalg.norm(perp))
    elif spec.family == "rotating_field":
        m0 = float(rng.uniform(0.5, 1.5)) * scale
        omega = float(rng.uniform(0.1, 5.0))
        sched = QubitFieldSchedule(RotatingField(m0, omega))
        psi0 = random_state(2, rng)
    else:  # pragma: no cover - guarded by TrialSpec
        raise UsageError(spec.family)
    return sched, psi0


# Accept a draw only if min sigma_H^4 >= max sigma_Hdot^2 / CONDITION_AMP:
# identities built from the unitless dh amplify floating-point rounding by
# sigma_Hdot^2 / sigma_H^4, so near-degenerate dips would report spurious
# residuals that say nothing about the inequalities themselves.
CONDITION_AMP = 1e6
MAX_REDRAWS = 50


def _build_trial(spec: TrialSpec):
    """Deterministic, conditioned (schedule, trajectory) of a trial.

    Draws are resampled (from the same seeded stream) until the trajectory
    stays clear of the degenerate regime.
    """
    rng = np.random.default_rng(spec.seed)
    times = spec.grid.times()
    for _ in range(MAX_REDRAWS):
        sched, psi0 = _draw_trial(spec, rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            traj = propagate(sched, psi0, spec.grid)
        sig_min_sq = min(variance(sched.eval_H(t), traj.states[i])
                         for i, t in enumerate(times))
        sigdot_max_sq = max(variance(sched.eval_Hdot(t), traj.states[i])
                            for i, t in enumerate(times))
        if sig_min_sq ** 2 * CONDITION_AMP >= sigdot_max_sq and sig_min_sq >= 1e-6:
            break
    return sched, traj, rng


class _Accumulator:
    """Tracks the worst residual per check and collects violation records."""

    def __init__(self, report: TrialReport, sched, max_records: int = 4):
        self.report = report
        self.sched = sched
        self.max_records = max_records

    def record(self, check: str, value: float, t: float, psi=None, extra=None):
        res = self.report.residuals
        if check in SLACK_CHECKS:
            worst = res.get(check)
            res[check] = value if worst is None else min(worst, value)
            violated = value < -TOLERANCES[check]
        else:
            worst = res.get(check)
            res[check] = value if worst is None else max(worst, value)
            violated = value > TOLERANCES[check]
        if violated:
            self.report.violations[check] = self.report.violations.get(check, 0) + 1
            if len(self.report.violation_records) < self.max_records:
                rec = {"check": check, "t": t, "value": value,
                       "seed": self.report.spec.seed,
                       "schedule": schedule_to_dict(self.sched)}
                if psi is not None:
                    rec["state"] = [[float(z.real), float(z.imag)] for z in psi]
                if extra is not None:
                    rec.update(extra)
                self.report.violation_records.append(rec)


def _per_step_checks(acc: _Accumulator, obs, t: float, psi, constant: bool):
    hbar = acc.sched.hbar
    a_H = 0.0 if obs.degenerate else obs.a_H
    acc.record("main_bound", obs.sigma_Hdot_sq / hbar ** 2 - a_H ** 2, t, psi)
    schwarz = obs.sigma_Hdot_sq * obs.sigma_H_sq - abs(obs.cross) ** 2
    acc.record("schwarz", schwarz, t, psi)
    lhs = 4 * abs(obs.cross) ** 2
    rhs = abs(obs.comm_exp) ** 2 + abs(obs.anti_exp) ** 2
    denom = max(lhs, rhs, 1e-12)
    acc.record("decomposition", abs(lhs - rhs) / denom, t, psi)
    acc.record("comm_real", abs(obs.comm_exp.real), t, psi)
    acc.record("anti_imag", abs(obs.anti_exp.imag), t, psi)
    if not obs.degenerate:
        acc.record("dhp_mean", abs(obs.dhp_mean), t, psi)
        dsig = hbar * obs.a_H
        rhs_ac1 = hbar ** 2 * (obs.sigma_Hdot_sq - dsig ** 2) / obs.sigma_H_sq ** 2
        acc.record("ac1_identity", abs(obs.dhp_sq - rhs_ac1), t, psi)
        acc.record("kappa_ac_imag", abs(obs.kappa_ac_raw.imag), t, psi)
        if constant:
            acc.record("stationary_reduction",
                       abs(obs.kappa_ac_raw.real - obs.kappa_lt), t, psi)
        kac = obs.kappa_ac_raw.real
        if acc.report.min_kappa_ac is None or kac < acc.report.min_kappa_ac:
            acc.report.min_kappa_ac = kac


def _uncertainty_checks(acc: _Accumulator, spec: TrialSpec, rng, n_pairs: int = 3):
    """Generalized uncertainty relation for random observable pairs."""
    for _ in range(n_pairs):
        A = random_hermitian(spec.dim, spec.ensemble_scale, rng)
        B = random_hermitian(spec.dim, spec.ensemble_scale, rng)
        psi = random_state(spec.dim, rng)
        comm = np.vdot(psi, commutator(A, B) @ psi)
        slack = variance(A, psi) * variance(B, psi) - abs(comm) ** 2 / 4
        acc.record("uncertainty", slack, 0.0, psi,
                   extra={"observables": "random-pair"})


# Both integrators carry global O(dt^2)-or-better truncation, so the raw
# dual-path deviation at step dt is compared after rescaling to DUAL_REF_DT
# (same normalization idea as love2_fd).
DUAL_REF_DT = 1e-3


def _dual_path_checks(acc: _Accumulator, traj, obs_list, times):
    """Bloch-ODE path vs operator path on v_H, a_H, sigma_Hdot, <H>, <Hdot>."""
    fld = acc.sched.fld
    hbar = acc.sched.hbar
    bloch = integrate_bloch(fld, bloch_from_state(traj.states[0]), traj.grid)
    worst = 0.0
    worst_norm = 0.0
    for i, t in enumerate(times):
        a = bloch[i]
        worst_norm = max(worst_norm, abs(np.linalg.norm(a) - 1.0))
        m = fld.m(t)
        md = fld.mdot(t)
        o = obs_list[i]
        dev = abs(vH_closed(a, m) - np.sqrt(o.sigma_H_sq) / hbar)
        dev = max(dev, abs(energy_loss_rate(a, md) - o.exp_Hdot))
        dev = max(dev, abs(float(a @ m) - o.exp_H))
        sig_cl = np.sqrt(max(float(md @ md) - float(a @ md) ** 2, 0.0))
        dev = max(dev, abs(sig_cl - np.sqrt(o.sigma_Hdot_sq)))
        if not o.degenerate and vH_closed(a, m) >= EPS_DEG:
            dev = max(dev, abs(aH_closed(a, m, md) - o.a_H))
        worst = max(worst, dev)
    acc.record("dual_path", worst * (DUAL_REF_DT / traj.grid.dt) ** 2, times[0])
    acc.record("bloch_norm", worst_norm, times[0])


def run_trial(spec: TrialSpec) -> TrialReport:
    """Propagate one random trial and evaluate the full invariant chain."""
    sched, traj, rng = _build_trial(spec)
    report = TrialReport(spec=spec)
    acc = _Accumulator(report, sched)

    times = spec.grid.times()
    hbar = sched.hbar
    obs_list = [step_observables(sched.eval_H(t), sched.eval_Hdot(t),
                                 traj.states[i], hbar)
                for i, t in enumerate(times)]
    constant = spec.family == "constant"
    for i, t in enumerate(times):
        o = obs_list[i]
        if o.degenerate:
            report.degenerate_steps += 1
        _per_step_checks(acc, o, float(t), traj.states[i], constant)

    # Central FD of sigma_H^2 against the anticommutator expectation.
    dt = spec.grid.dt
    sig_sq = np.array([o.sigma_H_sq for o in obs_list])
    for i in range(1, len(times) - 1):
        fd = (sig_sq[i + 1] - sig_sq[i - 1]) / (2 * dt)
        resid = abs(fd - obs_list[i].anti_exp.real) / dt ** 2
        acc.record("love2_fd", resid, float(times[i]), traj.states[i],
                   extra={"fd_window": [float(times[i - 1]), float(times[i + 1])]})

    _uncertainty_checks(acc, spec, rng)

    if spec.family in QUBIT_FAMILIES:
        _dual_path_checks(acc, traj, obs_list, times)

    return report


def replay_violation(record: dict) -> float:
    """Recompute the residual of a serialized per-step violation record."""
    sched = schedule_from_dict(record["schedule"])
    check = record["check"]
    t = record["t"]
    psi = as_state(np.array([complex(re, im) for re, im in record["state"]]))
    if check == "love2_fd":
        t0, t1 = record["fd_window"]
        dt = (t1 - t0) / 2
        raise UsageError("love2_fd replay requires the full trajectory; "
                         f"re-run the trial seed {record['seed']} (dt={dt})")
    obs = step_observables(sched.eval_H(t), sched.eval_Hdot(t), psi, sched.hbar)
    hbar = sched.hbar
    if check == "main_bound":
        a_H = 0.0 if obs.degenerate else obs.a_H
        return obs.sigma_Hdot_sq / hbar ** 2 - a_H ** 2
    if check == "schwarz":
        return obs.sigma_Hdot_sq * obs.sigma_H_sq - abs(obs.cross) ** 2
    if check == "decomposition":
        lhs = 4 * abs(obs.cross) ** 2
        rhs = abs(obs.comm_exp) ** 2 + abs(obs.anti_exp) ** 2
        return abs(lhs - rhs) / max(lhs, rhs, 1e-12)
    if check == "comm_real":
        return abs(obs.comm_exp.real)
    if check == "anti_imag":
        return abs(obs.anti_exp.imag)
    if check == "dhp_mean":
        return abs(obs.dhp_mean)
    if check == "ac1_identity":
        dsig = hbar * obs.a_H
        rhs_ac1 = hbar ** 2 * (obs.sigma_Hdot_sq - dsig ** 2) / obs.sigma_H_sq ** 2
        return abs(obs.dhp_sq - rhs_ac1)
    if check == "kappa_ac_imag":
        return abs(obs.kappa_ac_raw.imag)
    if check == "stationary_reduction":
        return abs(obs.kappa_ac_raw.real - obs.kappa_lt)
    raise UsageError(f"check {check!r} has no per-step replay")


DEFAULT_GRID = TimeGrid(0.0, 1.0, 51)


def make_specs(n_trials: int, base_seed: int, dims, families,
               grid: TimeGrid = DEFAULT_GRID,
               ensemble_scale: float = 0.15) -> list[TrialSpec]:
    """Deterministic trial plan: seeds are base_seed + index; the (dim,
    family) pair cycles through the cross product, with qubit-only families
    pinned to dim 2."""
    dims = list(dims)
    families = list(families)
    specs = []
    for i in range(n_trials):
        family = families[i % len(families)]
        dim = dims[(i // len(families)) % len(dims)]
        if family in QUBIT_FAMILIES:
            dim = 2
        specs.append(TrialSpec(dim=dim, family=family, seed=base_seed + i,
                               grid=grid, ensemble_scale=ensemble_scale))
    return specs


def _worker_count() -> int:
    env = os.environ.get("QGEOM_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"QGEOM_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def run_campaign(n_trials: int, base_seed: int, dims, families,
                 grid: TimeGrid = DEFAULT_GRID,
                 ensemble_scale: float = 0.15,
                 max_workers: Optional[int] = None) -> dict:
    """Run a deterministic campaign and assemble the JSON-ready report.

    Aggregation is order-independent (min/max/count), so the report is
    identical regardless of the worker count.
    """
    if n_trials < 1:
        raise UsageError("n_trials must be >= 1")
    specs = make_specs(n_trials, base_seed, dims, families, grid, ensemble_scale)
    workers = max_workers if max_workers is not None else _worker_count()
    if workers > 1 and n_trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(run_trial, specs,
                                  chunksize=max(1, n_trials // (workers * 8))))
    else:
        reports = [run_trial(s) for s in specs]

    summary_res: dict = {k: None for k in TOLERANCES}
    violations_total: dict = {k: 0 for k in TOLERANCES}
    records: list = []
    min_kappa_ac = None
    degenerate_steps = 0
    for rep in reports:
        for k in TOLERANCES:
            v = rep.residuals.get(k)
            if v is None:
                continue
            cur = summary_res[k]
            if cur is None:
                summary_res[k] = v
            else:
                summary_res[k] = min(cur, v) if k in SLACK_CHECKS else max(cur, v)
            violations_total[k] += rep.violations.get(k, 0)
        if rep.min_kappa_ac is not None:
            min_kappa_ac = rep.min_kappa_ac if min_kappa_ac is None \
                else min(min_kappa_ac, rep.min_kappa_ac)
        degenerate_steps += rep.degenerate_steps
        if len(records) < 32:
            records.extend(rep.violation_records[:32 - len(records)])

    n_violations = sum(violations_total.values())
    return {
        "version": __version__,
        "tolerances": dict(TOLERANCES),
        "params": {
            "n_trials": n_trials,
            "base_seed": base_seed,
            "dims": list(dims),
            "families": list(families),
            "grid": {"t0": grid.t0, "t1": grid.t1, "steps": grid.steps},
            "ensemble_scale": ensemble_scale,
        },
        "trials": [rep.to_dict() for rep in reports],
        "summary": {
            "min_main_slack": summary_res["main_bound"],
            "residuals": summary_res,
            "violations": n_violations,
            "violations_by_check": violations_total,
            "min_kappa_ac": min_kappa_ac,
            "kappa_ac_monitor_floor": KAPPA_AC_MONITOR_FLOOR,
            "kappa_ac_below_floor": (min_kappa_ac is not None
                                     and min_kappa_ac < KAPPA_AC_MONITOR_FLOOR),
            "degenerate_steps": degenerate_steps,
        },
        "violation_records": records,
    }


def report_to_json(report: dict) -> str:
    """Canonical byte-stable serialization of a campaign report."""
    return json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"
