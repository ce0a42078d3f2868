import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smolin.errors import ValidationError
from smolin.linalg import (
    I2,
    X,
    Y,
    Z,
    hermitian_eigenvalues,
    hs_norm,
    partial_trace,
    partial_transpose,
    permute_qubits,
    tensor,
    validate_density_matrix,
)
from smolin.states import bell_projector, smolin

from conftest import random_density_matrix, random_hermitian


def test_tensor_examples():
    assert np.array_equal(tensor(I2, I2), np.eye(4))
    assert np.array_equal(tensor(X, X), np.fliplr(np.eye(4)))
    assert tensor(np.eye(4), np.eye(4)).shape == (16, 16)


def test_tensor_order_is_first_factor_most_significant():
    ket0, ket1 = np.array([1, 0]), np.array([0, 1])
    # |1> on qubit 0, |0> on qubit 1 is basis index 0b10
    v = np.kron(ket1, ket0)
    assert v[2] == 1


def test_permute_identity_and_swap():
    m = tensor(X, Z)
    assert np.array_equal(permute_qubits(m, [0, 1]), m)
    assert np.allclose(permute_qubits(m, [1, 0]), tensor(Z, X))


def test_permute_moves_qubit_i_to_perm_i():
    m = tensor(X, Y, Z)
    # X goes to position 2, Y to 0, Z to 1
    assert np.allclose(permute_qubits(m, [2, 0, 1]), tensor(Y, Z, X))


def test_permute_swap_twice_on_smolin():
    rho = smolin()
    perm = [0, 2, 1, 3]
    assert np.allclose(permute_qubits(permute_qubits(rho, perm), perm), rho, atol=1e-15)


def test_smolin_is_symmetric_under_all_permutations():
    rho = smolin()
    for perm in itertools.permutations(range(4)):
        assert np.max(np.abs(permute_qubits(rho, perm) - rho)) < 1e-12


def test_permute_rejects_non_bijection():
    with pytest.raises(ValidationError):
        permute_qubits(np.eye(4), [0, 0])


def test_partial_transpose_reference_matrix():
    m = np.arange(16).reshape(4, 4).astype(complex)
    expected_first = np.array([[0, 1, 8, 9], [4, 5, 12, 13], [2, 3, 10, 11], [6, 7, 14, 15]])
    expected_second = np.array([[0, 4, 2, 6], [1, 5, 3, 7], [8, 12, 10, 14], [9, 13, 11, 15]])
    assert np.array_equal(partial_transpose(m, [0]), expected_first)
    assert np.array_equal(partial_transpose(m, [1]), expected_second)
    assert np.array_equal(partial_transpose(m, [0, 1]), m.T)


def test_partial_transpose_bell_spectrum():
    ev = hermitian_eigenvalues(partial_transpose(bell_projector(0), [1]))
    assert np.allclose(ev, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_smolin_invariant_under_two_qubit_transposes():
    rho = smolin()
    for subset in ([2, 3], [0, 1], [0, 2], [1, 3], [0, 3]):
        assert np.max(np.abs(partial_transpose(rho, subset) - rho)) < 1e-12


def test_partial_transpose_rejects_bad_subset():
    with pytest.raises(ValidationError):
        partial_transpose(np.eye(4), [2])
    with pytest.raises(ValidationError):
        partial_transpose(np.eye(4), [0, 0])


def test_partial_trace_examples():
    rho = smolin()
    assert np.allclose(partial_trace(rho, [0, 1, 2, 3]), rho)
    assert np.allclose(partial_trace(rho, [0, 1]), np.eye(4) / 4, atol=1e-15)
    assert np.allclose(partial_trace(bell_projector(0), [0]), np.eye(2) / 2)


def test_partial_trace_keeps_requested_order(rng):
    a, b = random_density_matrix(2, rng), random_density_matrix(2, rng)
    m = tensor(a, b)
    assert np.allclose(partial_trace(m, [1, 0]), tensor(b, a))


def test_eigenvalue_examples():
    assert np.allclose(hermitian_eigenvalues(np.eye(4)), [1, 1, 1, 1])
    assert np.allclose(hermitian_eigenvalues(Z), [-1, 1])
    ev = hermitian_eigenvalues(smolin())
    assert np.sum(np.abs(ev) < 1e-12) == 12
    assert np.allclose(ev[-4:], 0.25, atol=1e-12)


def test_eigenvalues_reject_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]], dtype=complex))


def _charpoly_roots(m):
    """Faddeev-LeVerrier coefficients, then polynomial roots."""
    n = m.shape[0]
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(m)
    c = 1.0 + 0j
    for k in range(1, n + 1):
        mk = m @ mk + c * np.eye(n)
        c = -np.trace(m @ mk) / k
        coeffs.append(c)
    return np.sort(np.roots(coeffs).real)


def test_eigenvalues_match_characteristic_polynomial(rng):
    for _ in range(200):
        h = random_hermitian(4, rng)
        assert np.allclose(hermitian_eigenvalues(h), _charpoly_roots(h), atol=1e-8)


def test_hs_norm_of_identity():
    assert hs_norm(np.eye(16)) == pytest.approx(4.0, abs=1e-12)


def test_validate_density_matrix():
    validate_density_matrix(np.eye(4) / 4)
    with pytest.raises(ValidationError):
        validate_density_matrix(np.eye(4))
    with pytest.raises(ValidationError):
        validate_density_matrix(np.diag([1.5, -0.5]))


subsets = st.lists(st.integers(0, 3), unique=True, max_size=4)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), subset=subsets)
def test_partial_transpose_properties(seed, subset):
    rho = random_density_matrix(16, np.random.default_rng(seed))
    pt = partial_transpose(rho, subset)
    assert np.allclose(partial_transpose(pt, subset), rho, atol=1e-14)
    assert abs(np.trace(pt) - 1) < 1e-12
    assert np.allclose(pt, pt.conj().T, atol=1e-14)
    complement = [q for q in range(4) if q not in subset]
    assert np.allclose(pt, partial_transpose(rho, complement).T, atol=1e-14)
    assert abs(hermitian_eigenvalues(pt).sum() - 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), perm=st.permutations(range(4)), subset=subsets)
def test_permutation_commutes_with_partial_transpose(seed, perm, subset):
    rho = random_density_matrix(16, np.random.default_rng(seed))
    moved = [perm[q] for q in subset]
    lhs = permute_qubits(partial_transpose(rho, subset), perm)
    rhs = partial_transpose(permute_qubits(rho, perm), moved)
    assert np.allclose(lhs, rhs, atol=1e-14)
    # permuting preserves the spectrum
    assert np.allclose(hermitian_eigenvalues(permute_qubits(rho, perm)), hermitian_eigenvalues(rho), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), keep=st.lists(st.integers(0, 3), unique=True, min_size=1, max_size=4))
def test_partial_trace_preserves_trace(seed, keep):
    rho = random_density_matrix(16, np.random.default_rng(seed))
    red = partial_trace(rho, keep)
    assert red.shape == (2 ** len(keep),) * 2
    assert abs(np.trace(red) - 1) < 1e-12
