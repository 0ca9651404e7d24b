"""Interferometer hardware: beam splitters, spin flipper, path and spin observables, SG projectors.

Mirrors are not modelled: they add no relative phase between the two arms, so they act
as the identity on the path-spin state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import I2, PAULI_X, TOL, PathSpinState, SpinState

SQRT_HALF = 1 / math.sqrt(2)


@dataclass(frozen=True)
class BeamSplitterParams:
    """Second beam splitter amplitudes; ``gamma**2 + delta**2 == 1``."""

    gamma: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and math.isfinite(self.delta)):
            raise ValueError("gamma and delta must be finite")
        if abs(self.gamma**2 + self.delta**2 - 1.0) > TOL:
            raise ValueError(f"gamma^2 + delta^2 = {self.gamma**2 + self.delta**2!r}, expected 1")
        if not (-1 - TOL <= self.gamma <= 1 + TOL and -1 - TOL <= self.delta <= 1 + TOL):
            raise ValueError("gamma and delta must lie in [-1, 1]")

    @classmethod
    def from_gamma(cls, gamma: float) -> BeamSplitterParams:
        """Sweep convention: gamma in [0, 1] and delta = +sqrt(1 - gamma^2)."""
        if not 0.0 <= gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
        return cls(gamma, math.sqrt(1.0 - gamma * gamma))

    @classmethod
    def from_angle(cls, alpha: float) -> BeamSplitterParams:
        return cls(math.cos(alpha), math.sin(alpha))


@dataclass(frozen=True)
class SpinSetting:
    """Analyzer angle theta in radians, reduced to [0, pi) since sigma_theta has period pi."""

    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        object.__setattr__(self, "theta", math.fmod(self.theta, math.pi) % math.pi)

    @property
    def axis(self) -> np.ndarray:
        """Bloch-sphere direction measured by sigma_theta (x-z plane, polar angle 2*theta)."""
        return np.array([math.sin(2 * self.theta), 0.0, math.cos(2 * self.theta)])


@dataclass(frozen=True)
class ThetaPolarization:
    """Spin basis |up>_v = sin v |up>_z + cos v |down>_z and its partner |down>_v."""

    vartheta: float

    def __post_init__(self):
        if not math.isfinite(self.vartheta):
            raise ValueError("vartheta must be finite")

    def up(self) -> SpinState:
        return SpinState([math.sin(self.vartheta), math.cos(self.vartheta)])

    def down(self) -> SpinState:
        # rotation-matrix partner: reduces to +|down>_z at vartheta = pi/2
        return SpinState([-math.cos(self.vartheta), math.sin(self.vartheta)])

    def flip_operator(self) -> np.ndarray:
        up = self.up().amplitudes
        down = self.down().amplitudes
        return np.outer(up, down.conj()) + np.outer(down, up.conj())


Z_BASIS = ThetaPolarization(math.pi / 2)


def _setting(value) -> SpinSetting:
    return value if isinstance(value, SpinSetting) else SpinSetting(float(value))


def bs1_transform(input_spin: SpinState) -> PathSpinState:
    """50:50 splitter: transmitted to |psi1> with 1/sqrt2, reflected to |psi2> with i/sqrt2."""
    return PathSpinState.product([SQRT_HALF, 1j * SQRT_HALF], input_spin)


def spin_flipper(state: PathSpinState, channel: int = 1,
                 flip_basis: ThetaPolarization | None = None) -> PathSpinState:
    """Exchange up/down of ``flip_basis`` on path channel 1 or 2 only.

    ``flip_basis=None`` is the z basis, applied as an exact Pauli X.
    """
    if channel not in (1, 2):
        raise ValueError("channel must be 1 or 2")
    flip = PAULI_X if flip_basis is None else flip_basis.flip_operator()
    blocks = state.amplitudes.reshape(2, 2).copy()
    blocks[channel - 1] = flip @ blocks[channel - 1]
    return PathSpinState(blocks.reshape(4))


def path_observable(params: BeamSplitterParams) -> np.ndarray:
    g, d = params.gamma, params.delta
    return np.array([
        [g * g - d * d, -2j * g * d],
        [2j * g * d, d * d - g * g],
    ])


def bs2_output_kets(params: BeamSplitterParams) -> tuple[np.ndarray, np.ndarray]:
    """Output kets (psi3, psi4) in the (psi1, psi2) basis; eigenvalues +1 and -1 of the path observable."""
    g, d = params.gamma, params.delta
    psi3 = np.array([-1j * g, d])
    psi4 = np.array([d, -1j * g])
    return psi3, psi4


def spin_observable(setting) -> np.ndarray:
    t = 2 * _setting(setting).theta
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, s], [s, -c]], dtype=complex)


def sg_projectors(setting) -> tuple[np.ndarray, np.ndarray]:
    sigma = spin_observable(setting)
    return (I2 + sigma) / 2, (I2 - sigma) / 2
