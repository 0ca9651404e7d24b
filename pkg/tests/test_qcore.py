import math

import numpy as np
import pytest
from hypothesis import given

from pathspin.elements import BeamSplitterParams, bs2_output_kets, path_observable, spin_observable
from pathspin.errors import DegenerateBranch, NonHermitianObservable, NotNormalized
from pathspin.qcore import (
    I2,
    I4,
    PAULI_X,
    PAULI_Z,
    PathSpinState,
    SpinState,
    conditional_spin,
    expectation,
    normalize,
    project_path,
    tensor,
)

from .conftest import SQRT_HALF, complex_matrices, path_spin_states, bs_params


def kron_elementwise(A, B):
    out = np.zeros((4, 4), dtype=complex)
    for p in range(2):
        for q in range(2):
            for s in range(2):
                for t in range(2):
                    out[2 * p + s, 2 * q + t] = A[p, q] * B[s, t]
    return out


def test_tensor_identity():
    assert np.array_equal(tensor(I2, I2), I4)


def test_tensor_basis_order():
    assert np.array_equal(tensor(PAULI_Z, I2), np.diag([1, 1, -1, -1]))


def test_tensor_matches_elementwise_oracle():
    A = path_observable(BeamSplitterParams(SQRT_HALF, SQRT_HALF))
    B = spin_observable(math.pi / 4)
    got = tensor(A, B)
    assert np.allclose(got, kron_elementwise(A, B), atol=1e-15)
    # -i X on the diagonal blocks vanish; only the anti-diagonal corners survive
    assert np.allclose(got, np.array([[0, 0, 0, -1j], [0, 0, -1j, 0], [0, 1j, 0, 0], [1j, 0, 0, 0]]))


@given(complex_matrices(), complex_matrices(), complex_matrices(), complex_matrices())
def test_tensor_mixed_product(A, B, C, D):
    assert np.allclose(tensor(A, B) @ tensor(C, D), tensor(A @ C, B @ D), atol=1e-12)
    assert np.allclose(tensor(A, B), kron_elementwise(A, B), atol=1e-12)


@given(complex_matrices(), complex_matrices(), complex_matrices())
def test_tensor_bilinear(A, B, C):
    assert np.allclose(tensor(A + 2 * C, B), tensor(A, B) + 2 * tensor(C, B), atol=1e-12)
    assert np.allclose(tensor(A, B + C), tensor(A, B) + tensor(A, C), atol=1e-12)


def test_states_check_norm_without_fixing_it():
    with pytest.raises(NotNormalized):
        PathSpinState([1, 1, 0, 0])
    with pytest.raises(NotNormalized):
        SpinState([1, 1])
    assert np.allclose(normalize([1, 1]), [SQRT_HALF, SQRT_HALF])


def test_states_reject_nonfinite_and_are_read_only():
    with pytest.raises(ValueError):
        SpinState([np.nan, 1])
    s = SpinState.up()
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


def test_expectation_eigenstate():
    state = PathSpinState([1, 0, 0, 0])
    assert expectation(state, np.diag([1, 1, -1, -1])) == 1.0


def test_expectation_rejects_non_hermitian():
    state = PathSpinState([SQRT_HALF, 1j * SQRT_HALF, 0, 0])
    with pytest.raises(NonHermitianObservable):
        expectation(state, tensor(I2, np.array([[0, 1], [0, 0]])))


@pytest.mark.parametrize("theta", np.linspace(0, math.pi, 7))
def test_spin_expectation_of_prepared_state_vanishes(pan_home, theta):
    assert abs(expectation(pan_home, tensor(I2, spin_observable(theta)))) < 1e-12


@pytest.mark.parametrize("gamma", [0.0, 0.3, SQRT_HALF, 1.0])
def test_path_expectation_of_prepared_state_vanishes(pan_home, gamma):
    params = BeamSplitterParams.from_gamma(gamma)
    # oracle: the two BS2 branch weights, each computed by a direct projector sum
    psi3, psi4 = bs2_output_kets(params)
    w = [float(np.linalg.norm(tensor(np.outer(k, k.conj()), I2) @ pan_home.amplitudes) ** 2)
         for k in (psi3, psi4)]
    assert w == pytest.approx([0.5, 0.5], abs=1e-12)
    assert abs(expectation(pan_home, tensor(path_observable(params), I2)) - (w[0] - w[1])) < 1e-12


def test_project_prepared_state_on_first_arm(pan_home):
    prob, cond = project_path(pan_home, [1, 0])
    assert prob == pytest.approx(0.5, abs=1e-12)
    assert cond.allclose(PathSpinState([0, 1, 0, 0]))


def test_project_orthogonal_branch_is_degenerate():
    with pytest.raises(DegenerateBranch):
        project_path(PathSpinState([0, 0, 1, 0]), [1, 0])


def test_project_on_psi3(pan_home):
    params = BeamSplitterParams(0.6, 0.8)
    psi3, _ = bs2_output_kets(params)
    prob, cond = project_path(pan_home, psi3)
    assert prob == pytest.approx(0.5, abs=1e-12)
    # hand substitution: psi3 branch is i(gamma|down> + delta|up>)/sqrt2 -> normalized i(0.8, 0.6)
    expected = np.kron(psi3, 1j * np.array([0.8, 0.6]))
    assert cond.allclose(PathSpinState(expected))


@given(path_spin_states(), bs_params())
def test_branch_probabilities_sum_to_one(state, params):
    psi3, psi4 = bs2_output_kets(params)
    total = 0.0
    for ket in (psi3, psi4):
        try:
            total += project_path(state, ket)[0]
        except DegenerateBranch as exc:
            total += exc.probability
    assert abs(total - 1) < 1e-12


@given(path_spin_states(), bs_params(), complex_matrices())
def test_law_of_total_expectation(state, params, M):
    obs = tensor(I2, M + M.conj().T)
    total = 0.0
    for ket in bs2_output_kets(params):
        try:
            p, cond = project_path(state, ket)
        except DegenerateBranch:
            continue
        total += p * expectation(cond, obs)
    # obs commutes with the path projectors, so the branch average reproduces it
    assert abs(total - expectation(state, obs)) < 1e-12 * max(1.0, float(np.abs(M).sum()))


def test_conditional_spin_matches_project_path(pan_home):
    p, spin = conditional_spin(pan_home, [0, 1])
    assert p == pytest.approx(0.5)
    assert np.allclose(spin.amplitudes, [1j, 0])


def test_pauli_helpers():
    assert np.array_equal(PAULI_X @ PAULI_X, I2)
    assert np.allclose(SpinState([SQRT_HALF, SQRT_HALF]).bloch(), [1, 0, 0])
    assert np.allclose(SpinState([SQRT_HALF, 1j * SQRT_HALF]).bloch(), [0, 1, 0])
