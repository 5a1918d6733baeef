"""Command-line entry point: simulate, qubit, verify, bounds.

All subcommands are deterministic given their flags (RNG seeds are flags)
and never leave partial files behind: outputs are written to a temp file
and renamed on success.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .errors import ConfigError, DomainError, NumericError, UsageError
from .geometry import (CSV_HEADER, ParticleParams, caianiello_bounds,
                       pati_acceleration_and_jerk, sample_csv_row,
                       sample_trajectory, samples_to_csv, step_observables)
from .propagator import propagate
from .qubit import integrate_bloch, qubit_bound_report, state_from_bloch
from .schedules import (FixedAxisField, FourierField, QubitFieldSchedule,
                        RotatingField, TimeGrid, schedule_from_dict)
from .verify import run_campaign, report_to_json

# CODATA 2018 values for the electron preset.
ELECTRON = {"m0": 9.1093837015e-31, "c": 2.99792458e8, "hbar": 1.054571817e-34}


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qgeom-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_vec3(text: str, flag: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"{flag} expects 'x,y,z', got {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from exc


def _parse_grid(text: str) -> TimeGrid:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--grid expects 't0,t1,steps', got {text!r}")
    return TimeGrid(float(parts[0]), float(parts[1]), int(parts[2]))


def cmd_simulate(args) -> int:
    with open(args.config) as fh:
        doc = json.load(fh)
    sched = schedule_from_dict(doc)
    grid_doc = doc.get("grid", {"t0": 0.0, "t1": 1.0, "steps": 1001})
    grid = TimeGrid(float(grid_doc["t0"]), float(grid_doc["t1"]), int(grid_doc["steps"]))
    if "state" in doc:
        psi0 = np.array([complex(re, im) for re, im in doc["state"]])
    elif "bloch" in doc and sched.dim == 2:
        psi0 = state_from_bloch(np.asarray(doc["bloch"], dtype=float))
    else:
        raise ConfigError("$.state", "config must provide 'state' amplitudes "
                          "(or 'bloch' for dim-2 schedules)")

    traj = propagate(sched, psi0, grid)
    samples = sample_trajectory(traj)
    csv_name = args.csv or "geometry.csv"
    _atomic_write(os.path.join(args.out, csv_name), samples_to_csv(samples))
    meta = {
        "version": __version__,
        "hbar": sched.hbar,
        "grid": {"t0": grid.t0, "t1": grid.t1, "steps": grid.steps},
        "config": doc,
        "csv": csv_name,
    }
    _atomic_write(os.path.join(args.out, "meta.json"),
                  json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return 0


QUBIT_CSV_HEADER = CSV_HEADER + ",ax,ay,az,mx,my,mz,triple"


def _qubit_field(args):
    if args.field == "fixed-axis":
        if args.m0 is None or args.alpha is None:
            raise UsageError("--field fixed-axis requires --m0 x,y,z and --alpha")
        return FixedAxisField(_parse_vec3(args.m0, "--m0"), float(args.alpha))
    if args.field == "rotating":
        if args.m0 is None or args.omega is None:
            raise UsageError("--field rotating requires --m0 (scalar) and --omega")
        try:
            m0 = float(args.m0)
        except ValueError as exc:
            raise UsageError(f"--m0 must be a scalar for rotating fields: {exc}") from exc
        return RotatingField(m0, float(args.omega))
    if args.field == "fourier":
        if not args.term:
            raise UsageError("--field fourier requires at least one --term")
        base = _parse_vec3(args.base, "--base") if args.base else np.zeros(3)
        terms = []
        for raw in args.term:
            pieces = raw.split(";")
            if len(pieces) != 3:
                raise UsageError(f"--term expects 'bx,by,bz;cx,cy,cz;omega', got {raw!r}")
            terms.append((_parse_vec3(pieces[0], "--term b"),
                          _parse_vec3(pieces[1], "--term c"),
                          float(pieces[2])))
        return FourierField(base, tuple(terms))
    raise UsageError(f"unknown field family {args.field!r}")


def cmd_qubit(args) -> int:
    fld = _qubit_field(args)
    a0 = _parse_vec3(args.a0, "--a0")
    norm = np.linalg.norm(a0)
    if norm < 1e-12:
        raise UsageError("--a0 cannot be normalized (zero vector)")
    a0 = a0 / norm
    grid = _parse_grid(args.grid)
    times = grid.times()

    bloch = integrate_bloch(fld, a0, grid)
    sched = QubitFieldSchedule(fld)

    # Geometry of the Bloch path: rebuild the pure state from each Bloch
    # vector (phase-free quantities only) and reuse the operator evaluators.
    traj_states = np.array([state_from_bloch(a) for a in bloch])
    from .propagator import Trajectory
    traj = Trajectory(grid=grid, states=traj_states, schedule=sched)
    samples = sample_trajectory(traj)

    rows = [QUBIT_CSV_HEADER]
    for i, sm in enumerate(samples):
        m = fld.m(times[i])
        md = fld.mdot(times[i])
        triple = qubit_bound_report(bloch[i], m, md)["triple"]
        extra = [repr(float(x)) for x in (*bloch[i], *m, triple)]
        rows.append(sample_csv_row(sm) + "," + ",".join(extra))
    csv_name = args.csv or "qubit.csv"
    _atomic_write(os.path.join(args.out, csv_name), "\n".join(rows) + "\n")

    meta = {
        "version": __version__,
        "grid": {"t0": grid.t0, "t1": grid.t1, "steps": grid.steps},
        "field": fld.params_dict(),
        "a0": a0.tolist(),
        "csv": csv_name,
    }
    if args.check_operator_path:
        op_traj = propagate(sched, state_from_bloch(a0), grid)
        dev = 0.0
        for i, t in enumerate(times):
            o_b = step_observables(sched.eval_H(t), sched.eval_Hdot(t),
                                   traj_states[i], sched.hbar)
            o_u = step_observables(sched.eval_H(t), sched.eval_Hdot(t),
                                   op_traj.states[i], sched.hbar)
            dev = max(dev,
                      abs(o_b.exp_H - o_u.exp_H),
                      abs(o_b.exp_Hdot - o_u.exp_Hdot),
                      abs(math.sqrt(o_b.sigma_H_sq) - math.sqrt(o_u.sigma_H_sq)),
                      abs(math.sqrt(o_b.sigma_Hdot_sq) - math.sqrt(o_u.sigma_Hdot_sq)))
            if o_b.a_H is not None and o_u.a_H is not None:
                dev = max(dev, abs(o_b.a_H - o_u.a_H))
        meta["dual_path_max_deviation"] = dev
    _atomic_write(os.path.join(args.out, "meta.json"),
                  json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_verify(args) -> int:
    dims = [int(d) for d in args.dims.split(",")]
    families = [f.strip() for f in args.families.split(",")]
    grid = TimeGrid(0.0, args.t1, args.steps)
    report = run_campaign(args.trials, args.seed, dims, families, grid=grid,
                          ensemble_scale=args.scale, max_workers=args.workers)
    _atomic_write(args.report, report_to_json(report))
    n = report["summary"]["violations"]
    print(f"campaign: {args.trials} trials, {n} violations, "
          f"min main slack {report['summary']['min_main_slack']}")
    return 0 if n == 0 else 1


def _parse_delta_x(text: str, m0: float, c: float, hbar: float) -> float:
    if text == "compton/2":
        return hbar / (m0 * c) / 2
    return float(text)


def cmd_bounds(args) -> int:
    if args.particle == "electron":
        consts = dict(ELECTRON)
    else:
        if args.m0 is None or args.c is None or args.hbar is None:
            raise UsageError("--particle custom requires --m0, --c and --hbar")
        consts = {"m0": args.m0, "c": args.c, "hbar": args.hbar}
    delta_x = None
    if args.delta_x is not None:
        delta_x = _parse_delta_x(args.delta_x, consts["m0"], consts["c"], consts["hbar"])
    params = ParticleParams(m0=consts["m0"], c=consts["c"], hbar=consts["hbar"],
                            delta_x=delta_x, mu=args.mu, lam=args.lam)
    out = {"particle": args.particle, "bounds": caianiello_bounds(params)}
    if args.vh is not None:
        out["pati"] = pati_acceleration_and_jerk(args.vh, args.sigma_hdot or 0.0, params)
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgeom",
        description="Geometric kinematics and acceleration bounds of unitary "
                    "quantum evolution.")
    parser.add_argument("--version", action="version", version=f"qgeom {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("simulate", help="propagate a schedule and emit the geometry CSV")
    p.add_argument("--config", required=True, help="JSON schedule config path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--csv", default=None, help="CSV file name (default geometry.csv)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("qubit", help="Bloch-path qubit run with extended CSV")
    p.add_argument("--field", required=True, choices=["fixed-axis", "rotating", "fourier"])
    p.add_argument("--m0", default=None, help="'x,y,z' for fixed-axis, scalar for rotating")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--base", default=None, help="fourier base field 'x,y,z'")
    p.add_argument("--term", action="append", default=[],
                   help="fourier term 'bx,by,bz;cx,cy,cz;omega' (repeatable)")
    p.add_argument("--a0", required=True, help="initial Bloch vector 'x,y,z'")
    p.add_argument("--grid", required=True, help="'t0,t1,steps'")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", default=None, help="CSV file name (default qubit.csv)")
    p.add_argument("--check-operator-path", action="store_true",
                   help="also propagate the operator path and record the max deviation")
    p.set_defaults(func=cmd_qubit)

    p = sub.add_parser("verify", help="run a randomized verification campaign")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--dims", default="2,3,4,8")
    p.add_argument("--families", default="constant,fourier,fixed_axis,rotating_field")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True, help="JSON report path")
    p.add_argument("--steps", type=int, default=51)
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--scale", type=float, default=0.15)
    p.add_argument("--workers", type=int, default=None,
                   help="override QGEOM_THREADS / machine parallelism")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="evaluate the physical bound formulas")
    p.add_argument("--particle", choices=["electron", "custom"], default="electron")
    p.add_argument("--m0", type=float, default=None, help="rest mass, kg")
    p.add_argument("--c", type=float, default=None, help="speed of light, m/s")
    p.add_argument("--hbar", type=float, default=None, help="reduced Planck constant, J s")
    p.add_argument("--delta-x", dest="delta_x", default=None,
                   help="position uncertainty in m, or the keyword 'compton/2'")
    p.add_argument("--mu", type=float, default=None, help="minimum-uncertainty mass, kg")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="particle linear dimension, m")
    p.add_argument("--vh", type=float, default=None, help="v_H in 1/s for the Pati bound")
    p.add_argument("--sigma-hdot", dest="sigma_hdot", type=float, default=None,
                   help="sigma_Hdot for the jerk bound (energy/s)")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigError, DomainError, FileNotFoundError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
