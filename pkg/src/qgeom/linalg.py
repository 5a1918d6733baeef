"""Dense complex linear algebra for small Hermitian systems.

Operators are plain complex numpy arrays. Hermiticity and unit norm are
enforced constructively (symmetrize, renormalize) at the entry points
``as_hermitian`` / ``as_state`` so that drift from repeated arithmetic
cannot poison downstream invariants.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericError, UsageError

HERMITICITY_TOL = 1e-12
IMAG_RESIDUE_TOL = 1e-10
VARIANCE_CLAMP_TOL = 1e-12


def as_hermitian(A: np.ndarray, skew_tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate and symmetrize a square matrix into an exactly Hermitian one.

    Raises UsageError if any entry is non-finite, the matrix is not square
    of dim >= 2, or the skew part exceeds ``skew_tol``.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise UsageError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] < 2:
        raise UsageError("operator dimension must be >= 2")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise UsageError("operator entries must be finite")
    skew = np.max(np.abs(A - A.conj().T))
    if skew > skew_tol:
        raise UsageError(f"matrix is not Hermitian: skew part {skew:.3e} > {skew_tol:.0e}")
    return (A + A.conj().T) / 2


def as_state(psi: np.ndarray) -> np.ndarray:
    """Validate and renormalize a complex vector into a unit-norm pure state."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size < 2:
        raise UsageError("state dimension must be >= 2")
    if not np.all(np.isfinite(psi.real)) or not np.all(np.isfinite(psi.imag)):
        raise UsageError("state amplitudes must be finite")
    norm = np.linalg.norm(psi)
    if norm < 1e-12:
        raise UsageError("cannot normalize a (near-)zero vector")
    return psi / norm


def _check_dims(A: np.ndarray, psi: np.ndarray) -> None:
    if A.shape[0] != psi.shape[0]:
        raise UsageError(f"dimension mismatch: operator {A.shape[0]}, state {psi.shape[0]}")


def expectation(A: np.ndarray, psi: np.ndarray) -> float:
    """<psi|A|psi> for Hermitian A. The imaginary residue must stay below 1e-10."""
    _check_dims(A, psi)
    val = np.vdot(psi, A @ psi)
    if abs(val.imag) >= IMAG_RESIDUE_TOL:
        raise NumericError(f"expectation has imaginary residue {val.imag:.3e}")
    return float(val.real)


def variance(A: np.ndarray, psi: np.ndarray) -> float:
    """<A^2> - <A>^2, clamped to 0 when within -1e-12 of zero."""
    _check_dims(A, psi)
    Apsi = A @ psi
    second = float(np.vdot(Apsi, Apsi).real)  # <A^2> = ||A psi||^2 for Hermitian A
    first = expectation(A, psi)
    var = second - first * first
    if var < 0:
        if var < -VARIANCE_CLAMP_TOL:
            raise NumericError(f"variance {var:.3e} below clamp tolerance")
        var = 0.0
    return var


def centered(A: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """A - <A> I; the centered operator has vanishing expectation."""
    _check_dims(A, psi)
    return A - expectation(A, psi) * np.eye(A.shape[0])


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """AB - BA. Anti-Hermitian when both inputs are Hermitian."""
    if A.shape != B.shape:
        raise UsageError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def anticommutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """AB + BA. Hermitian when both inputs are Hermitian."""
    if A.shape != B.shape:
        raise UsageError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B + B @ A


def unitary_of(H: np.ndarray, tau: float, hbar: float = 1.0) -> np.ndarray:
    """exp(-i H tau / hbar) via Hermitian eigendecomposition.

    The eigendecomposition route keeps the result unitary up to eigensolver
    accuracy, which matters more than speed at the dimensions handled here.
    """
    if not np.isfinite(tau):
        raise UsageError("tau must be finite")
    H = as_hermitian(H, skew_tol=np.inf)
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"Hermitian eigensolver failed: {exc}") from exc
    phases = np.exp(-1j * w * (tau / hbar))
    return (V * phases) @ V.conj().T


def random_hermitian(dim: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    """scale * (M + M^dagger)/2 with i.i.d. standard complex Gaussian M entries."""
    if dim < 2:
        raise UsageError("dim must be >= 2")
    if scale <= 0:
        raise UsageError("scale must be > 0")
    M = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    return scale * (M + M.conj().T) / 2


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform pure state: normalized complex Gaussian vector."""
    if dim < 2:
        raise UsageError("dim must be >= 2")
    while True:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        if np.linalg.norm(v) > 1e-12:
            return as_state(v)


# Pauli matrices, used throughout the qubit specialization and tests.
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z])


def pauli_dot(v) -> np.ndarray:
    """v . sigma for a real 3-vector v."""
    v = np.asarray(v, dtype=float)
    return v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z
