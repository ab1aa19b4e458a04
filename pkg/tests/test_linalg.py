"""Tests for the dense-matrix helpers: norms, random states, fidelity,
density-matrix validation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmtransfer.linalg import (
    check_density_matrix,
    dagger,
    fidelity,
    frobenius_norm,
    is_density_matrix,
    random_density_matrix,
    random_unitary,
)


# ---------------------------------------------------------------------------
# frobenius_norm / dagger
# ---------------------------------------------------------------------------

def test_frobenius_norm_literal():
    m = np.array([[3.0, 0.0], [0.0, 4.0]])
    assert frobenius_norm(m) == pytest.approx(5.0)


def test_frobenius_norm_complex():
    m = np.array([[1.0 + 1.0j, 0.0], [0.0, 1.0 - 1.0j]])
    assert frobenius_norm(m) == pytest.approx(2.0)


def test_frobenius_norm_rejects_vectors():
    with pytest.raises(ValueError):
        frobenius_norm(np.ones(4))


def test_dagger_is_conjugate_transpose():
    m = np.array([[1.0 + 2.0j, 3.0], [4.0j, 5.0]])
    np.testing.assert_array_equal(dagger(m), m.conj().T)


# ---------------------------------------------------------------------------
# random_density_matrix / random_unitary
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_random_density_matrix_is_valid(n):
    rho = random_density_matrix(n, seed=17)
    check_density_matrix(rho)
    assert rho.shape == (n, n)


def test_random_density_matrix_deterministic():
    a = random_density_matrix(4, seed=3)
    b = random_density_matrix(4, seed=3)
    np.testing.assert_array_equal(a, b)
    c = random_density_matrix(4, seed=4)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_random_unitary_is_unitary(n):
    u = random_unitary(n, seed=11)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-12)


def test_random_unitary_not_trivially_real():
    u = random_unitary(3, seed=2)
    assert np.max(np.abs(u.imag)) > 1e-3


# ---------------------------------------------------------------------------
# fidelity
# ---------------------------------------------------------------------------

def test_fidelity_identical_states():
    rho = random_density_matrix(3, seed=5)
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_orthogonal_pure_states():
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.diag([0.0, 1.0]).astype(complex)
    assert fidelity(rho, sigma) == pytest.approx(0.0, abs=1e-12)


def test_fidelity_pure_vs_mixed_literal():
    # F(|0><0|, I/2) = <0| I/2 |0> = 1/2
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.eye(2, dtype=complex) / 2
    assert fidelity(rho, sigma) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_symmetric():
    rho = random_density_matrix(4, seed=8)
    sigma = random_density_matrix(4, seed=9)
    assert fidelity(rho, sigma) == pytest.approx(fidelity(sigma, rho), abs=1e-10)


def test_fidelity_shape_mismatch():
    with pytest.raises(ValueError):
        fidelity(np.eye(2) / 2, np.eye(3) / 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_fidelity_in_unit_interval(seed_a, seed_b):
    rho = random_density_matrix(3, seed_a)
    sigma = random_density_matrix(3, seed_b)
    f = fidelity(rho, sigma)
    assert 0.0 <= f <= 1.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fidelity_unitary_invariance(seed):
    rho = random_density_matrix(3, seed)
    sigma = random_density_matrix(3, seed + 1)
    u = random_unitary(3, seed + 2)
    rotated = fidelity(u @ rho @ u.conj().T, u @ sigma @ u.conj().T)
    assert rotated == pytest.approx(fidelity(rho, sigma), abs=1e-9)


# ---------------------------------------------------------------------------
# density-matrix validation
# ---------------------------------------------------------------------------

def test_check_accepts_maximally_mixed():
    check_density_matrix(np.eye(3) / 3)


def test_check_rejects_nonsquare():
    with pytest.raises(ValueError, match="square"):
        check_density_matrix(np.ones((2, 3)) / 6)


def test_check_rejects_nonhermitian():
    m = np.array([[0.5, 0.5], [0.0, 0.5]], dtype=complex)
    with pytest.raises(ValueError, match="Hermitian"):
        check_density_matrix(m)


def test_check_rejects_bad_trace():
    with pytest.raises(ValueError, match="trace"):
        check_density_matrix(np.eye(2, dtype=complex))


def test_check_rejects_negative_eigenvalue():
    m = np.diag([1.5, -0.5]).astype(complex)
    with pytest.raises(ValueError, match="positive"):
        check_density_matrix(m)


def test_check_rejects_oversized_offdiagonal():
    # |rho_12|^2 > rho_11 rho_22 (this also breaks positivity, through which
    # the rejection surfaces; the element bound is a redundant screen).
    m = np.array([[1.0, 0.1], [0.1, 0.0]], dtype=complex)
    with pytest.raises(ValueError):
        check_density_matrix(m)


def test_is_density_matrix_bool_wrapper():
    assert is_density_matrix(np.eye(2) / 2)
    assert not is_density_matrix(np.eye(2))


def test_element_bound_holds_for_valid_states():
    rho = random_density_matrix(4, seed=21)
    for a in range(4):
        for c in range(4):
            assert abs(rho[a, c]) ** 2 <= rho[a, a].real * rho[c, c].real + 1e-12
