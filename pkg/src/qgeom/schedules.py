"""Parametric time-dependent Hamiltonian families H(t) with analytic Hdot(t).

Every family carries an analytic derivative; finite differencing
(``fd_Hdot``) exists only as a cross-check oracle, never as the production
path, because the dispersion of Hdot enters the bound tolerances directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, UsageError
from .linalg import as_hermitian, pauli_dot


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid on [t0, t1] with `steps` points inclusive."""

    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if not (self.t1 > self.t0):
            raise UsageError("time grid requires t1 > t0")
        if self.steps < 2:
            raise UsageError("time grid requires steps >= 2")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / (self.steps - 1)

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.steps)


class HamiltonianSchedule:
    """Base class: a family producing Hermitian H(t) and analytic Hdot(t)."""

    family: str
    dim: int
    hbar: float = 1.0

    def eval_H(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def eval_Hdot(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def params_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantSchedule(HamiltonianSchedule):
    A: np.ndarray
    hbar: float = 1.0
    family: str = "constant"

    def __post_init__(self):
        object.__setattr__(self, "A", as_hermitian(self.A, skew_tol=1e-9))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def eval_H(self, t: float) -> np.ndarray:
        return self.A

    def eval_Hdot(self, t: float) -> np.ndarray:
        return np.zeros_like(self.A)

    def params_dict(self) -> dict:
        return {"family": "constant", "A": matrix_to_json(self.A)}


@dataclass(frozen=True)
class FourierSchedule(HamiltonianSchedule):
    """H(t) = A + sum_k [B_k cos(w_k t) + C_k sin(w_k t)]."""

    A: np.ndarray
    terms: tuple  # of (B, C, omega)
    hbar: float = 1.0
    family: str = "fourier"

    def __post_init__(self):
        A = as_hermitian(self.A, skew_tol=1e-9)
        terms = []
        for B, C, omega in self.terms:
            if not np.isfinite(omega):
                raise UsageError("fourier omega must be finite")
            B = as_hermitian(B, skew_tol=1e-9)
            C = as_hermitian(C, skew_tol=1e-9)
            if B.shape != A.shape or C.shape != A.shape:
                raise UsageError("fourier term dimension mismatch")
            terms.append((B, C, float(omega)))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def eval_H(self, t: float) -> np.ndarray:
        H = self.A.copy()
        for B, C, omega in self.terms:
            H += B * np.cos(omega * t) + C * np.sin(omega * t)
        return H

    def eval_Hdot(self, t: float) -> np.ndarray:
        Hd = np.zeros_like(self.A)
        for B, C, omega in self.terms:
            Hd += -omega * np.sin(omega * t) * B + omega * np.cos(omega * t) * C
        return Hd

    def params_dict(self) -> dict:
        return {
            "family": "fourier",
            "A": matrix_to_json(self.A),
            "terms": [
                {"B": matrix_to_json(B), "C": matrix_to_json(C), "omega": omega}
                for B, C, omega in self.terms
            ],
        }


class MagneticField:
    """A qubit driving field: m(t) and its analytic derivative mdot(t)."""

    family: str

    def m(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def mdot(self, t: float) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class FixedAxisField(MagneticField):
    """m(t) = (|m0| + alpha t) * unit(m0): intensity ramp along a fixed axis."""

    m0: np.ndarray
    alpha: float
    family: str = "fixed_axis"

    def __post_init__(self):
        m0 = np.asarray(self.m0, dtype=float).reshape(3)
        if not np.all(np.isfinite(m0)) or np.linalg.norm(m0) == 0:
            raise UsageError("fixed_axis m0 must be finite and nonzero")
        object.__setattr__(self, "m0", m0)

    def m(self, t: float) -> np.ndarray:
        n = self.m0 / np.linalg.norm(self.m0)
        return (np.linalg.norm(self.m0) + self.alpha * t) * n

    def mdot(self, t: float) -> np.ndarray:
        return self.alpha * self.m0 / np.linalg.norm(self.m0)

    def params_dict(self) -> dict:
        return {"family": "fixed_axis_qubit", "m0": self.m0.tolist(), "alpha": self.alpha}


@dataclass(frozen=True)
class RotatingField(MagneticField):
    """m(t) = m0 * (cos wt, sin wt, 0): constant-intensity rotating field."""

    m0: float
    omega: float
    family: str = "rotating_field"

    def m(self, t: float) -> np.ndarray:
        return self.m0 * np.array([np.cos(self.omega * t), np.sin(self.omega * t), 0.0])

    def mdot(self, t: float) -> np.ndarray:
        w = self.omega
        return self.m0 * w * np.array([-np.sin(w * t), np.cos(w * t), 0.0])

    def params_dict(self) -> dict:
        return {"family": "rotating_field_qubit", "m0": self.m0, "omega": self.omega}


@dataclass(frozen=True)
class FourierField(MagneticField):
    """m(t) = base + sum_k [b_k cos(w_k t) + c_k sin(w_k t)] with 3-vector coefficients."""

    base: np.ndarray
    terms: tuple  # of (b, c, omega) 3-vectors
    family: str = "custom_fourier"

    def __post_init__(self):
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float).reshape(3))
        terms = tuple(
            (np.asarray(b, dtype=float).reshape(3), np.asarray(c, dtype=float).reshape(3), float(w))
            for b, c, w in self.terms
        )
        object.__setattr__(self, "terms", terms)

    def m(self, t: float) -> np.ndarray:
        out = self.base.copy()
        for b, c, w in self.terms:
            out += b * np.cos(w * t) + c * np.sin(w * t)
        return out

    def mdot(self, t: float) -> np.ndarray:
        out = np.zeros(3)
        for b, c, w in self.terms:
            out += -w * np.sin(w * t) * b + w * np.cos(w * t) * c
        return out

    def params_dict(self) -> dict:
        return {
            "family": "custom_fourier_qubit",
            "base": self.base.tolist(),
            "terms": [{"b": b.tolist(), "c": c.tolist(), "omega": w} for b, c, w in self.terms],
        }


@dataclass(frozen=True)
class QubitFieldSchedule(HamiltonianSchedule):
    """Operator view H(t) = m(t) . sigma of a magnetic field schedule."""

    fld: MagneticField
    hbar: float = 1.0

    @property
    def family(self) -> str:  # type: ignore[override]
        return {"fixed_axis": "fixed_axis_qubit",
                "rotating_field": "rotating_field_qubit",
                "custom_fourier": "custom_fourier_qubit"}[self.fld.family]

    @property
    def dim(self) -> int:
        return 2

    def eval_H(self, t: float) -> np.ndarray:
        return pauli_dot(self.fld.m(t))

    def eval_Hdot(self, t: float) -> np.ndarray:
        return pauli_dot(self.fld.mdot(t))

    def params_dict(self) -> dict:
        return self.fld.params_dict()


@dataclass(frozen=True)
class PiecewiseLinearSchedule(HamiltonianSchedule):
    """Linear interpolation between Hermitian knot matrices."""

    knot_times: tuple
    knot_matrices: tuple
    hbar: float = 1.0
    family: str = "piecewise_linear"
    _knot_tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        ts = tuple(float(t) for t in self.knot_times)
        if len(ts) < 2 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise UsageError("piecewise_linear needs >= 2 strictly increasing knots")
        mats = tuple(as_hermitian(M, skew_tol=1e-9) for M in self.knot_matrices)
        if len(mats) != len(ts):
            raise UsageError("knot count mismatch")
        if any(M.shape != mats[0].shape for M in mats):
            raise UsageError("knot matrices must share a dimension")
        object.__setattr__(self, "knot_times", ts)
        object.__setattr__(self, "knot_matrices", mats)

    @property
    def dim(self) -> int:
        return self.knot_matrices[0].shape[0]

    def _segment(self, t: float) -> int:
        if t < self.knot_times[0] or t > self.knot_times[-1]:
            raise DomainError(
                f"t={t} outside knot range [{self.knot_times[0]}, {self.knot_times[-1]}]")
        idx = int(np.searchsorted(self.knot_times, t, side="right")) - 1
        return min(max(idx, 0), len(self.knot_times) - 2)

    def eval_H(self, t: float) -> np.ndarray:
        i = self._segment(t)
        t0, t1 = self.knot_times[i], self.knot_times[i + 1]
        w = (t - t0) / (t1 - t0)
        return (1 - w) * self.knot_matrices[i] + w * self.knot_matrices[i + 1]

    def eval_Hdot(self, t: float) -> np.ndarray:
        # Derivative at a knot is deliberately undefined: a silent one-sided
        # convention would corrupt slack statistics downstream.
        for tk in self.knot_times[1:-1]:
            if abs(t - tk) <= self._knot_tol:
                raise DomainError(f"Hdot undefined at knot t={tk}")
        i = self._segment(t)
        t0, t1 = self.knot_times[i], self.knot_times[i + 1]
        return (self.knot_matrices[i + 1] - self.knot_matrices[i]) / (t1 - t0)

    def params_dict(self) -> dict:
        return {
            "family": "piecewise_linear",
            "knots": [
                {"t": t, "H": matrix_to_json(M)}
                for t, M in zip(self.knot_times, self.knot_matrices)
            ],
        }


def fd_Hdot(sched: HamiltonianSchedule, t: float, h: float) -> np.ndarray:
    """Central-difference oracle [H(t+h) - H(t-h)] / 2h for eval_Hdot."""
    if h <= 0:
        raise UsageError("fd step h must be > 0")
    return (sched.eval_H(t + h) - sched.eval_H(t - h)) / (2 * h)


# ---------------------------------------------------------------------------
# JSON (de)serialization
# ---------------------------------------------------------------------------

def matrix_to_json(M: np.ndarray) -> list:
    """Row-major nested lists with [re, im] entry pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def matrix_from_json(obj, path: str) -> np.ndarray:
    try:
        M = np.array([[complex(e[0], e[1]) for e in row] for row in obj])
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(path, f"malformed matrix: {exc}") from exc
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ConfigError(path, f"matrix must be square, got shape {M.shape}")
    try:
        return as_hermitian(M, skew_tol=1e-9)
    except UsageError as exc:
        raise ConfigError(path, str(exc)) from exc


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return doc[key]


def _vec3(obj, path: str) -> np.ndarray:
    try:
        v = np.asarray(obj, dtype=float).reshape(3)
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, f"expected a 3-vector: {exc}") from exc
    if not np.all(np.isfinite(v)):
        raise ConfigError(path, "vector entries must be finite")
    return v


FAMILY_ALIASES = {
    "fixed_axis": "fixed_axis_qubit",
    "rotating_field": "rotating_field_qubit",
    "custom_fourier": "custom_fourier_qubit",
}


def schedule_from_dict(doc: dict) -> HamiltonianSchedule:
    """Build a validated schedule from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("$", "document must be a JSON object")
    sched = _require(doc, "schedule", "$")
    if not isinstance(sched, dict):
        raise ConfigError("$.schedule", "must be a JSON object")
    hbar = float(doc.get("hbar", 1.0))
    if hbar <= 0 or not np.isfinite(hbar):
        raise ConfigError("$.hbar", "must be positive and finite")
    family = _require(sched, "family", "$.schedule")
    family = FAMILY_ALIASES.get(family, family)

    if family == "constant":
        A = matrix_from_json(_require(sched, "A", "$.schedule"), "$.schedule.A")
        out: HamiltonianSchedule = ConstantSchedule(A, hbar=hbar)
    elif family == "fourier":
        A = matrix_from_json(_require(sched, "A", "$.schedule"), "$.schedule.A")
        terms = []
        raw_terms = _require(sched, "terms", "$.schedule")
        for k, term in enumerate(raw_terms):
            p = f"$.schedule.terms[{k}]"
            B = matrix_from_json(_require(term, "B", p), f"{p}.B")
            C = matrix_from_json(_require(term, "C", p), f"{p}.C")
            omega = float(_require(term, "omega", p))
            terms.append((B, C, omega))
        out = FourierSchedule(A, tuple(terms), hbar=hbar)
    elif family == "fixed_axis_qubit":
        m0 = _vec3(_require(sched, "m0", "$.schedule"), "$.schedule.m0")
        alpha = float(_require(sched, "alpha", "$.schedule"))
        out = QubitFieldSchedule(FixedAxisField(m0, alpha), hbar=hbar)
    elif family == "rotating_field_qubit":
        m0 = float(_require(sched, "m0", "$.schedule"))
        omega = float(_require(sched, "omega", "$.schedule"))
        out = QubitFieldSchedule(RotatingField(m0, omega), hbar=hbar)
    elif family == "custom_fourier_qubit":
        base = _vec3(sched.get("base", [0.0, 0.0, 0.0]), "$.schedule.base")
        terms = []
        for k, term in enumerate(_require(sched, "terms", "$.schedule")):
            p = f"$.schedule.terms[{k}]"
            b = _vec3(_require(term, "b", p), f"{p}.b")
            c = _vec3(_require(term, "c", p), f"{p}.c")
            omega = float(_require(term, "omega", p))
            terms.append((b, c, omega))
        out = QubitFieldSchedule(FourierField(base, tuple(terms)), hbar=hbar)
    elif family == "piecewise_linear":
        knots = _require(sched, "knots", "$.schedule")
        ts, mats = [], []
        for k, knot in enumerate(knots):
            p = f"$.schedule.knots[{k}]"
            ts.append(float(_require(knot, "t", p)))
            mats.append(matrix_from_json(_require(knot, "H", p), f"{p}.H"))
        try:
            out = PiecewiseLinearSchedule(tuple(ts), tuple(mats), hbar=hbar)
        except UsageError as exc:
            raise ConfigError("$.schedule.knots", str(exc)) from exc
    else:
        raise ConfigError("$.schedule.family", f"unknown family {family!r}")

    if "dim" in doc and int(doc["dim"]) != out.dim:
        raise ConfigError("$.dim", f"declared dim {doc['dim']} != schedule dim {out.dim}")
    return out


def schedule_to_dict(sched: HamiltonianSchedule) -> dict:
    return {"dim": sched.dim, "hbar": sched.hbar, "schedule": sched.params_dict()}


def parse_schedule(config_text: str) -> HamiltonianSchedule:
    """Parse and fully validate a JSON schedule document."""
    try:
        doc = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from exc
    return schedule_from_dict(doc)


def serialize_schedule(sched: HamiltonianSchedule) -> str:
    return json.dumps(schedule_to_dict(sched))
