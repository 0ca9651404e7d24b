"""Hidden-variable analyses.

* A Bell-type deterministic model for one qubit: hidden variable lambda uniform on the
  unit sphere, outcome ``sign(lambda . n + p . n)`` for Bloch vector p and axis n. Its
  mean is exactly ``p . n`` because ``lambda . n`` is uniform on [-1, 1].
* Noncontextual value assignments for the path-spin system: every path setting and every
  spin setting gets a fixed +-1. A linear program decides whether a mixture of such
  assignments reproduces the quantum marginals and correlators.
* CHSH witnesses and a search for the maximal violation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import simplex
from .elements import BeamSplitterParams, SpinSetting, ThetaPolarization, path_observable, spin_observable
from .errors import InvalidSampleCount, TooManySettings
from .experiments import prepare_de_zela
from .qcore import I2, TOL, PathSpinState, conditional_spin, expectation, spin_expectation, tensor

MAX_SETTINGS = 20
MOMENT_TOL = 1e-9
WITNESS_MARGIN = 1e-6
MIN_CHANNEL_SAMPLES = 10_000


# --- single-qubit Bell model ----------------------------------------------------------

def _vector(v, name: str, unit: bool) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    norm = float(np.linalg.norm(v))
    if not np.all(np.isfinite(v)) or norm > 1 + TOL or (unit and abs(norm - 1) > TOL):
        raise ValueError(f"{name} must be a {'unit' if unit else 'Bloch'} vector, |v| = {norm!r}")
    return v


def bell_qubit_outcome(state_bloch, direction, hv) -> int:
    p = _vector(state_bloch, "state_bloch", unit=False)
    n = _vector(direction, "direction", unit=True)
    lam = _vector(hv, "hidden variable", unit=True)
    return 1 if float(lam @ n + p @ n) >= 0.0 else -1


def sample_sphere(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform points on S^2 via z ~ U[-1, 1) and azimuth ~ U[0, 2pi)."""
    z = rng.uniform(-1.0, 1.0, size)
    phi = rng.uniform(0.0, 2 * math.pi, size)
    r = np.sqrt(1.0 - z * z)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def bell_qubit_expectation_mc(state_bloch, direction, samples: int, seed) -> float:
    """Monte Carlo mean of the Bell model outcome; ``seed`` is an int or a SeedSequence."""
    if samples < 1:
        raise InvalidSampleCount(f"samples must be >= 1, got {samples}")
    p = _vector(state_bloch, "state_bloch", unit=False)
    n = _vector(direction, "direction", unit=True)
    lam = sample_sphere(_rng(seed), samples)
    outcomes = np.where(lam @ n + p @ n >= 0.0, 1, -1)
    return int(outcomes.sum()) / samples


@dataclass(frozen=True)
class ChannelCheck:
    channel: int
    bloch: tuple[float, float, float]
    quantum_mean: float
    mc_mean: float
    tolerance: float

    @property
    def abs_error(self) -> float:
        return abs(self.mc_mean - self.quantum_mean)

    @property
    def passed(self) -> bool:
        return self.abs_error < self.tolerance


def reproduce_de_zela_channels(vartheta, setting, samples: int, seed: int,
                               stream: tuple[int, ...] = ()) -> list[ChannelCheck]:
    """Run the qubit model on each arm's conditional spin state of the De Zela setup.

    Each arm draws from its own stream ``SeedSequence(seed, spawn_key=stream + (arm,))``
    so grid points evaluated in any order give identical numbers.
    """
    if samples < MIN_CHANNEL_SAMPLES:
        raise InvalidSampleCount(f"need at least {MIN_CHANNEL_SAMPLES} samples, got {samples}")
    pol = vartheta if isinstance(vartheta, ThetaPolarization) else ThetaPolarization(float(vartheta))
    setting = setting if isinstance(setting, SpinSetting) else SpinSetting(float(setting))
    state = prepare_de_zela(pol)
    sigma = spin_observable(setting)
    checks = []
    for arm, ket in ((1, [1, 0]), (2, [0, 1])):
        _, spin = conditional_spin(state, ket)
        p = spin.bloch()
        seq = np.random.SeedSequence(seed, spawn_key=(*stream, arm))
        checks.append(ChannelCheck(
            channel=arm,
            bloch=tuple(float(x) for x in p),
            quantum_mean=spin_expectation(spin, sigma),
            mc_mean=bell_qubit_expectation_mc(p, setting.axis, samples, seq),
            tolerance=4 / math.sqrt(samples),
        ))
    return checks


def mc_error_scaling(state_bloch, direction, sample_sizes: Sequence[int], repeats: int,
                     seed: int) -> list[float]:
    """Mean |MC - p.n| over ``repeats`` independent streams, per sample size."""
    target = float(np.asarray(state_bloch, dtype=float) @ np.asarray(direction, dtype=float))
    root = np.random.SeedSequence(seed)
    out = []
    for k, size in enumerate(sample_sizes):
        errs = [
            abs(bell_qubit_expectation_mc(state_bloch, direction, size,
                                          np.random.SeedSequence(root.entropy, spawn_key=(k, r))) - target)
            for r in range(repeats)
        ]
        out.append(float(np.mean(errs)))
    return out


# --- noncontextual assignments and LP ---------------------------------------------------

@dataclass(frozen=True)
class DeterministicAssignment:
    path_values: tuple[int, ...]
    spin_values: tuple[int, ...]

    def correlator(self, i: int, j: int) -> int:
        return self.path_values[i] * self.spin_values[j]


def _check_counts(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise ValueError("need at least one path and one spin setting")
    if m + n > MAX_SETTINGS:
        raise TooManySettings(f"m + n = {m + n} exceeds {MAX_SETTINGS}")


def enumerate_assignments(m: int, n: int) -> list[DeterministicAssignment]:
    """All 2**(m+n) assignments, lexicographic in (path values..., spin values...) with -1 < +1."""
    _check_counts(m, n)
    return [
        DeterministicAssignment(tuple(v[:m]), tuple(v[m:]))
        for v in itertools.product((-1, 1), repeat=m + n)
    ]


def vertex_matrix(m: int, n: int) -> np.ndarray:
    """Constraint matrix, one column per assignment in :func:`enumerate_assignments` order.

    Rows: normalization, path marginals a_i, spin marginals b_j, correlators a_i*b_j (i major).
    """
    _check_counts(m, n)
    k = m + n
    idx = np.arange(2**k)
    # bit (k-1-s) of the column index is setting s; 0 -> -1, 1 -> +1
    values = (((idx[None, :] >> (k - 1 - np.arange(k))[:, None]) & 1) * 2 - 1).astype(np.int8)
    a, b = values[:m], values[m:]
    corr = (a[:, None, :] * b[None, :, :]).reshape(m * n, -1)
    return np.vstack([np.ones((1, idx.size), dtype=np.int8), a, b, corr])


def quantum_moments(state: PathSpinState, path_settings: Sequence[BeamSplitterParams],
                    spin_settings: Sequence) -> np.ndarray:
    """Quantum values of the rows of :func:`vertex_matrix`."""
    paths = [path_observable(p) for p in path_settings]
    spins = [spin_observable(s) for s in spin_settings]
    rows = [1.0]
    rows += [expectation(state, tensor(A, I2)) for A in paths]
    rows += [expectation(state, tensor(I2, S)) for S in spins]
    rows += [expectation(state, tensor(A, S)) for A in paths for S in spins]
    return np.array(rows)


def correlator_table(state: PathSpinState, path_settings, spin_settings) -> np.ndarray:
    return np.array([[expectation(state, tensor(path_observable(p), spin_observable(s)))
                      for s in spin_settings] for p in path_settings])


@dataclass(frozen=True)
class ChshWitness:
    path_indices: tuple[int, int]
    spin_indices: tuple[int, int]
    value: float


@dataclass
class FeasibilityResult:
    feasible: bool
    weights: np.ndarray | None
    max_residual: float
    witness: ChshWitness | None = None
    farkas: np.ndarray | None = None
    iterations: int = 0

    @property
    def verdict(self) -> str:
        return "FEASIBLE" if self.feasible else "INFEASIBLE"


def solve_mixture(vertices: np.ndarray, moments: np.ndarray, max_iter: int = 20_000) -> FeasibilityResult:
    """Find w >= 0 with ``vertices @ w == moments`` (first row of both is the normalization)."""
    res = simplex.solve(np.zeros(vertices.shape[1]), vertices, moments, max_iter=max_iter)
    if res.status != "optimal":
        return FeasibilityResult(False, None, res.infeasibility, farkas=res.farkas, iterations=res.iterations)
    residual = float(np.max(np.abs(vertices.astype(float) @ res.x - moments)))
    return FeasibilityResult(residual < MOMENT_TOL, res.x, residual, iterations=res.iterations)


def chsh_value(E11: float, E12: float, E21: float, E22: float) -> float:
    """Largest |sum of the four correlators| with exactly one cell negated."""
    table = np.array([E11, E12, E21, E22], dtype=float)
    if np.any(np.abs(table) > 1 + MOMENT_TOL):
        raise ValueError("correlators must lie in [-1, 1]")
    total = table.sum()
    return float(max(abs(total - 2 * e) for e in table))


def best_chsh_witness(table: np.ndarray) -> ChshWitness | None:
    m, n = table.shape
    best = None
    for i1, i2 in itertools.combinations(range(m), 2):
        for j1, j2 in itertools.combinations(range(n), 2):
            v = chsh_value(table[i1, j1], table[i1, j2], table[i2, j1], table[i2, j2])
            if best is None or v > best.value:
                best = ChshWitness((i1, i2), (j1, j2), v)
    return best


def feasibility_lp(path_settings: Sequence[BeamSplitterParams], spin_settings: Sequence,
                   state: PathSpinState, max_iter: int = 20_000) -> FeasibilityResult:
    """Can a mixture of noncontextual assignments reproduce ``state``'s marginals and correlators?

    Raises :class:`SolverStall` when the iteration cap is hit; that outcome is never
    reported as feasible.
    """
    spin_settings = [s if isinstance(s, SpinSetting) else SpinSetting(float(s)) for s in spin_settings]
    m, n = len(path_settings), len(spin_settings)
    _check_counts(m, n)
    result = solve_mixture(vertex_matrix(m, n), quantum_moments(state, path_settings, spin_settings),
                           max_iter=max_iter)
    if not result.feasible:
        witness = best_chsh_witness(correlator_table(state, path_settings, spin_settings))
        if witness is not None and witness.value > 2 + WITNESS_MARGIN:
            result.witness = witness
    return result


# --- CHSH search ------------------------------------------------------------------------

@dataclass(frozen=True)
class ChshSearchResult:
    path_settings: tuple[BeamSplitterParams, BeamSplitterParams]
    spin_settings: tuple[SpinSetting, SpinSetting]
    value: float


def _correlator_fn(state: PathSpinState):
    psi = state.amplitudes

    def corr(alpha: float, theta: float) -> float:
        obs = tensor(path_observable(BeamSplitterParams.from_angle(alpha)), spin_observable(theta))
        return float(np.vdot(psi, obs @ psi).real)

    return corr


def chsh_search(state: PathSpinState, grid_density: int = 32) -> ChshSearchResult:
    """Coarse grid over (alpha1, alpha2, theta1, theta2), then a bounded local refinement.

    Path settings are gamma = cos(alpha), delta = sin(alpha) with alpha in [0, pi/2].
    """
    if grid_density < 8:
        raise ValueError("grid_density must be >= 8")
    corr = _correlator_fn(state)
    alphas = np.linspace(0.0, math.pi / 2, grid_density)
    thetas = np.arange(grid_density) * math.pi / grid_density
    E = np.array([[corr(a, t) for t in thetas] for a in alphas])

    # for rows i1, i2 the family maximum is max_j |E1j + E2j| + max_j |E1j - E2j|
    best = (-1.0, 0, 0, 0, 0)
    for i1 in range(grid_density):
        U = np.abs(E[i1][None, :] + E)
        V = np.abs(E[i1][None, :] - E)
        ju, jv = U.argmax(axis=1), V.argmax(axis=1)
        vals = U[np.arange(grid_density), ju] + V[np.arange(grid_density), jv]
        i2 = int(vals.argmax())
        if vals[i2] > best[0]:
            best = (float(vals[i2]), i1, i2, int(ju[i2]), int(jv[i2]))
    _, i1, i2, j1, j2 = best
    s1 = math.copysign(1.0, E[i1, j1] + E[i2, j1])
    s2 = math.copysign(1.0, E[i1, j2] - E[i2, j2])

    def objective(x):
        a1, a2, t1, t2 = x
        return -(s1 * (corr(a1, t1) + corr(a2, t1)) + s2 * (corr(a1, t2) - corr(a2, t2)))

    x0 = [alphas[i1], alphas[i2], thetas[j1], thetas[j2]]
    bounds = [(0.0, math.pi / 2)] * 2 + [(thetas[j1] - 1.0, thetas[j1] + 1.0), (thetas[j2] - 1.0, thetas[j2] + 1.0)]
    opt = minimize(objective, x0, method="L-BFGS-B", bounds=bounds,
                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 500})
    a1, a2, t1, t2 = opt.x if -opt.fun >= best[0] else x0
    paths = (BeamSplitterParams.from_angle(a1), BeamSplitterParams.from_angle(a2))
    spins = (SpinSetting(t1), SpinSetting(t2))
    table = correlator_table(state, paths, spins)
    return ChshSearchResult(paths, spins, chsh_value(*table.ravel()))
