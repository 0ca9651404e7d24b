"""End-to-end pipelines for the two interferometer layouts.

``pan-home``: BS1 + spin flipper prepare an entangled state, BS2 measures the path
observable (the context), SG1/SG2 measure sigma_theta on the two output ports.

``de-zela``: a rotated input spin goes through BS + spin flipper; the spin is measured
directly on the two arms. There is no path measurement and hence no context parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .elements import (
    BeamSplitterParams,
    SpinSetting,
    ThetaPolarization,
    bs1_transform,
    bs2_output_kets,
    path_observable,
    spin_flipper,
    spin_observable,
)
from .errors import DegenerateBranch, InvariantViolation
from .qcore import (
    I2,
    PAULI_Z,
    TOL,
    PathSpinState,
    SpinState,
    conditional_spin,
    expectation,
    spin_expectation,
    tensor,
)

Pipeline = Literal["pan-home", "de-zela"]


@dataclass(frozen=True)
class SubensembleReport:
    """Channel statistics of sigma_theta for one (state, context, setting) evaluation.

    Channel 3/4 are the BS2 output ports for pan-home and the arms psi1_D/psi2_D for
    de-zela. ``cond_mean*`` is ``None`` when the channel has zero probability.
    """

    gamma: float
    delta: float
    theta: float
    p3: float
    p4: float
    cond_mean3: float | None
    cond_mean4: float | None
    weighted_mean3: float
    weighted_mean4: float
    total_expectation: float
    correlator: float
    vartheta: float | None = None

    def validate(self) -> SubensembleReport:
        if abs(self.p3 + self.p4 - 1.0) > TOL:
            raise InvariantViolation(f"p3 + p4 = {self.p3 + self.p4!r} != 1")
        total = self.weighted_mean3 + self.weighted_mean4
        if abs(self.total_expectation - total) > TOL:
            raise InvariantViolation("total_expectation != weighted_mean3 + weighted_mean4")
        for m in (self.cond_mean3, self.cond_mean4):
            if m is not None and abs(m) > 1 + TOL:
                raise InvariantViolation(f"conditional mean {m!r} outside [-1, 1]")
        if abs(self.correlator - (self.weighted_mean3 - self.weighted_mean4)) > TOL:
            raise InvariantViolation("correlator != weighted_mean3 - weighted_mean4")
        return self


@dataclass(frozen=True)
class SweepGrid:
    gamma_values: Sequence[float] = (1 / math.sqrt(2),)
    theta_values: Sequence[float] = (math.pi / 8,)
    vartheta_values: Sequence[float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "gamma_values", tuple(float(g) for g in self.gamma_values))
        object.__setattr__(self, "theta_values", tuple(float(t) for t in self.theta_values))
        if self.vartheta_values is not None:
            object.__setattr__(self, "vartheta_values", tuple(float(v) for v in self.vartheta_values))
        if not self.gamma_values or not self.theta_values:
            raise ValueError("sweep grid must be nonempty")
        for g in self.gamma_values:
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"gamma {g!r} outside [0, 1]")
        if self.vartheta_values is not None and not self.vartheta_values:
            raise ValueError("vartheta grid must be nonempty when given")


def prepare_pan_home() -> PathSpinState:
    """(|psi1>|down> + i|psi2>|up>)/sqrt2 from BS1 on |up>_z and a flipper on arm 1."""
    return spin_flipper(bs1_transform(SpinState.up()), channel=1)


def prepare_de_zela(vartheta) -> PathSpinState:
    """(|psi1>|down>_v + i|psi2>|up>_v)/sqrt2 from BS on |up>_v and a v-basis flipper on arm 1."""
    pol = vartheta if isinstance(vartheta, ThetaPolarization) else ThetaPolarization(float(vartheta))
    return spin_flipper(bs1_transform(pol.up()), channel=1, flip_basis=pol)


def post_bs2_state(state: PathSpinState, params: BeamSplitterParams) -> PathSpinState:
    """Re-express ``state`` with the path in the (psi3, psi4) output basis."""
    psi3, psi4 = bs2_output_kets(params)
    change = np.vstack([psi3.conj(), psi4.conj()])
    return PathSpinState(tensor(change, I2) @ state.amplitudes)


def _channel_stats(state: PathSpinState, ket, sigma) -> tuple[float, float | None, float]:
    try:
        prob, spin = conditional_spin(state, ket)
    except DegenerateBranch as exc:
        return exc.probability, None, 0.0
    cond = spin_expectation(spin, sigma)
    return prob, cond, prob * cond


def _report(state, kets, path_obs, setting, gamma, delta, vartheta=None) -> SubensembleReport:
    sigma = spin_observable(setting)
    p3, c3, w3 = _channel_stats(state, kets[0], sigma)
    p4, c4, w4 = _channel_stats(state, kets[1], sigma)
    return SubensembleReport(
        gamma=gamma,
        delta=delta,
        theta=setting.theta,
        p3=p3,
        p4=p4,
        cond_mean3=c3,
        cond_mean4=c4,
        weighted_mean3=w3,
        weighted_mean4=w4,
        total_expectation=expectation(state, tensor(I2, sigma)),
        correlator=expectation(state, tensor(path_obs, sigma)),
        vartheta=vartheta,
    ).validate()


def run_path_spin(state: PathSpinState, params: BeamSplitterParams, setting) -> SubensembleReport:
    """Subensemble statistics of sigma_theta behind BS2 set to ``params``."""
    setting = setting if isinstance(setting, SpinSetting) else SpinSetting(float(setting))
    return _report(state, bs2_output_kets(params), path_observable(params), setting,
                   params.gamma, params.delta)


def run_de_zela(vartheta, setting) -> SubensembleReport:
    """Channel statistics of the De Zela state, read on the arms with no path measurement.

    gamma/delta in the report carry the substitution sin(v), cos(v) for comparison only.
    """
    pol = vartheta if isinstance(vartheta, ThetaPolarization) else ThetaPolarization(float(vartheta))
    setting = setting if isinstance(setting, SpinSetting) else SpinSetting(float(setting))
    arms = (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))
    return _report(prepare_de_zela(pol), arms, PAULI_Z, setting,
                   math.sin(pol.vartheta), math.cos(pol.vartheta), vartheta=pol.vartheta)


def closed_form_subensembles(params: BeamSplitterParams, setting) -> tuple[float, float]:
    """Probability-weighted SG1/SG2 means for the prepared entangled state."""
    setting = setting if isinstance(setting, SpinSetting) else SpinSetting(float(setting))
    g, d, t = params.gamma, params.delta, 2 * setting.theta
    sg1 = 0.5 * (d * d - g * g) * math.cos(t) + g * d * math.sin(t)
    sg2 = 0.5 * (g * g - d * d) * math.cos(t) - g * d * math.sin(t)
    return sg1, sg2


def correlator(state: PathSpinState, params: BeamSplitterParams, setting) -> float:
    """<A_gamma (x) sigma_theta>, the joint statistic of the commuting path/spin pair."""
    return expectation(state, tensor(path_observable(params), spin_observable(setting)))


@dataclass(frozen=True)
class DeZelaComparison:
    vartheta: float
    theta: float
    dz_ch1: float
    dz_ch2: float
    ph_sg1_mapped: float
    ph_sg2_mapped: float
    ph_sg1_unmapped: float
    ph_sg2_unmapped: float
    convention: str = field(default="theta -> -theta (equivalently vartheta -> -vartheta)")

    @property
    def residual_ch1(self) -> float:
        return abs(self.dz_ch1 - self.ph_sg1_mapped)

    @property
    def residual_ch2(self) -> float:
        return abs(self.dz_ch2 - self.ph_sg2_mapped)


def compare_de_zela(vartheta, setting) -> DeZelaComparison:
    """De Zela arm means against the pan-home closed forms at gamma = sin v, delta = cos v.

    With the real rotation convention for |down>_v the arms give (1/2)cos(2v + 2theta)
    type values while the closed forms give (1/2)cos(2v - 2theta); they agree after
    reflecting theta. Both the mapped and unmapped closed forms are reported.
    """
    pol = vartheta if isinstance(vartheta, ThetaPolarization) else ThetaPolarization(float(vartheta))
    setting = setting if isinstance(setting, SpinSetting) else SpinSetting(float(setting))
    dz = run_de_zela(pol, setting)
    params = BeamSplitterParams(math.sin(pol.vartheta), math.cos(pol.vartheta))
    mapped = closed_form_subensembles(params, SpinSetting(-setting.theta))
    unmapped = closed_form_subensembles(params, setting)
    return DeZelaComparison(
        vartheta=pol.vartheta,
        theta=setting.theta,
        dz_ch1=dz.weighted_mean3,
        dz_ch2=dz.weighted_mean4,
        ph_sg1_mapped=mapped[0],
        ph_sg2_mapped=mapped[1],
        ph_sg1_unmapped=unmapped[0],
        ph_sg2_unmapped=unmapped[1],
    )


def sweep(grid: SweepGrid, pipeline: Pipeline = "pan-home") -> list[SubensembleReport]:
    """Rows in deterministic order: outer parameter (gamma or vartheta), then theta."""
    if pipeline == "pan-home":
        state = prepare_pan_home()
        return [
            run_path_spin(state, BeamSplitterParams.from_gamma(g), SpinSetting(t))
            for g in grid.gamma_values
            for t in grid.theta_values
        ]
    if pipeline == "de-zela":
        if grid.vartheta_values is None:
            raise ValueError("de-zela sweep needs vartheta values")
        return [run_de_zela(v, t) for v in grid.vartheta_values for t in grid.theta_values]
    raise ValueError(f"unknown pipeline {pipeline!r}")
