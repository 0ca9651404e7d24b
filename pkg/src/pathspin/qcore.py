"""Dense complex linear algebra on the 2-dim path, 2-dim spin and 4-dim path-spin spaces.

Basis conventions (fixed everywhere):

* spin: ``(|up>_z, |down>_z)``
* path: ``(|psi1>, |psi2>)``
* path-spin: ``(|psi1 up>, |psi1 down>, |psi2 up>, |psi2 down>)`` -- path major, spin minor,
  so ``tensor(A, B) == np.kron(A, B)``.

Operators are plain ``complex128`` numpy arrays (2x2 or 4x4). States are frozen
dataclasses holding a read-only amplitude vector; constructors check the norm but
never renormalize silently.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBranch, NonHermitianObservable, NotNormalized

TOL = 1e-12
DEGENERATE_CUTOFF = 1e-14

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _frozen_vector(amplitudes, size: int) -> np.ndarray:
    vec = np.array(amplitudes, dtype=complex).reshape(-1)
    if vec.shape != (size,):
        raise ValueError(f"expected {size} amplitudes, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("amplitudes must be finite")
    vec.flags.writeable = False
    return vec


def _check_norm(vec: np.ndarray) -> None:
    norm2 = float(np.vdot(vec, vec).real)
    if abs(norm2 - 1.0) > TOL:
        raise NotNormalized(f"norm^2 = {norm2!r}, expected 1 within {TOL}")


@dataclass(frozen=True, eq=False)
class SpinState:
    amplitudes: np.ndarray

    def __post_init__(self):
        vec = _frozen_vector(self.amplitudes, 2)
        _check_norm(vec)
        object.__setattr__(self, "amplitudes", vec)

    @classmethod
    def up(cls) -> SpinState:
        return cls([1, 0])

    @classmethod
    def down(cls) -> SpinState:
        return cls([0, 1])

    def bloch(self) -> np.ndarray:
        """Bloch vector (<X>, <Y>, <Z>) of this pure state."""
        a, b = self.amplitudes
        return np.array([
            2 * (np.conj(a) * b).real,
            2 * (np.conj(a) * b).imag,
            abs(a) ** 2 - abs(b) ** 2,
        ])


@dataclass(frozen=True, eq=False)
class PathSpinState:
    amplitudes: np.ndarray

    def __post_init__(self):
        vec = _frozen_vector(self.amplitudes, 4)
        _check_norm(vec)
        object.__setattr__(self, "amplitudes", vec)

    @classmethod
    def product(cls, path_ket, spin: SpinState) -> PathSpinState:
        return cls(np.kron(np.asarray(path_ket, dtype=complex), spin.amplitudes))

    def branch(self, path_index: int) -> np.ndarray:
        """Unnormalized spin amplitudes carried by path ``|psi{path_index + 1}>``."""
        return self.amplitudes.reshape(2, 2)[path_index].copy()

    def allclose(self, other: PathSpinState, atol: float = TOL) -> bool:
        return bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol))


def normalize(amplitudes) -> np.ndarray:
    vec = np.asarray(amplitudes, dtype=complex)
    norm = np.linalg.norm(vec)
    if norm < DEGENERATE_CUTOFF:
        raise DegenerateBranch(float(norm**2))
    return vec / norm


def tensor(path_op, spin_op) -> np.ndarray:
    """Kronecker product in the path-major basis order."""
    return np.kron(np.asarray(path_op, dtype=complex), np.asarray(spin_op, dtype=complex))


def is_hermitian(op, atol: float = TOL) -> bool:
    op = np.asarray(op)
    return bool(np.allclose(op, op.conj().T, rtol=0, atol=atol))


def is_unitary(op, atol: float = TOL) -> bool:
    op = np.asarray(op)
    return bool(np.allclose(op.conj().T @ op, np.eye(op.shape[0]), rtol=0, atol=atol))


def is_involution(op, atol: float = TOL) -> bool:
    op = np.asarray(op)
    return bool(np.allclose(op @ op, np.eye(op.shape[0]), rtol=0, atol=atol))


def check_observable(op, name: str = "observable") -> None:
    """Raise unless ``op`` is Hermitian with eigenvalues +-1."""
    if not is_hermitian(op):
        raise NonHermitianObservable(f"{name} is not Hermitian within {TOL}")
    if not is_involution(op):
        raise ValueError(f"{name} does not square to the identity within {TOL}")


def sandwich(amplitudes, obs) -> float:
    vec = np.asarray(amplitudes, dtype=complex)
    value = np.vdot(vec, np.asarray(obs) @ vec)
    if abs(value.imag) >= TOL:
        raise NonHermitianObservable(f"imaginary residue {value.imag:.3e} in <v|O|v>")
    return float(value.real)


def expectation(state: PathSpinState, obs) -> float:
    return sandwich(state.amplitudes, obs)


def spin_expectation(spin: SpinState, obs) -> float:
    return sandwich(spin.amplitudes, obs)


def project_path(state: PathSpinState, path_ket) -> tuple[float, PathSpinState]:
    """Project the path onto ``path_ket``; return (probability, renormalized conditional state)."""
    ket = np.asarray(path_ket, dtype=complex)
    if abs(np.vdot(ket, ket).real - 1.0) > TOL:
        raise NotNormalized("path ket must be normalized")
    projector = tensor(np.outer(ket, ket.conj()), I2)
    projected = projector @ state.amplitudes
    prob = float(np.vdot(projected, projected).real)
    if prob < DEGENERATE_CUTOFF:
        raise DegenerateBranch(prob)
    return min(prob, 1.0), PathSpinState(projected / np.sqrt(prob))


def conditional_spin(state: PathSpinState, path_ket) -> tuple[float, SpinState]:
    """Like :func:`project_path` but returns the spin factor of the conditional state."""
    ket = np.asarray(path_ket, dtype=complex)
    spin_part = ket.conj() @ state.amplitudes.reshape(2, 2)
    prob = float(np.vdot(spin_part, spin_part).real)
    if prob < DEGENERATE_CUTOFF:
        raise DegenerateBranch(prob)
    return min(prob, 1.0), SpinState(spin_part / np.sqrt(prob))
