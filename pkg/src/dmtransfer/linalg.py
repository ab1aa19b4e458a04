"""Shared linear algebra: norms, random states, fidelity, density-matrix checks.

All matrices are plain complex numpy arrays.  A density matrix is any square
array that passes :func:`check_density_matrix`; no wrapper class is used.
"""
from __future__ import annotations

import numpy as np

# Default tolerances for density-matrix validation.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
ELEMENT_BOUND_TOL = 1e-10


def frobenius_norm(m: np.ndarray) -> float:
    """Frobenius (Hilbert-Schmidt) norm sqrt(tr(m m^dag)) of a matrix."""
    a = np.asarray(m)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    return float(np.linalg.norm(a, "fro"))


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def random_density_matrix(n: int, seed: int) -> np.ndarray:
    """Sample a full-rank density matrix from the Ginibre ensemble.

    Draws G with i.i.d. standard complex normal entries and returns
    G G^dag / tr(G G^dag), which is Hermitian, unit trace, and positive
    definite with probability 1.

    :param n: dimension (n >= 1)
    :param seed: seed for the random generator; equal seeds give equal samples
    :return: (n, n) complex density matrix
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    return rho


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Sample a Haar-random n x n unitary (QR of a Ginibre matrix, phase-fixed)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    """Matrix square root of a (numerically) PSD Hermitian matrix.

    Eigendecomposes the Hermitian part and clamps small negative eigenvalues
    to zero before taking square roots.
    """
    herm = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(herm)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1].

    Equals 1 iff the states coincide and 0 iff they have orthogonal support.
    Not unitarily invariant under rotating only one argument.
    """
    a = np.asarray(rho, dtype=complex)
    b = np.asarray(sigma, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"incompatible shapes {a.shape} and {b.shape}")
    s = _sqrtm_psd(a)
    inner = s @ b @ s
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)
    return min(1.0, f)


def check_density_matrix(
    rho: np.ndarray,
    hermiticity_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    psd_tol: float = PSD_TOL,
    element_tol: float = ELEMENT_BOUND_TOL,
) -> None:
    """Validate the density-matrix invariants, raising ValueError on failure.

    Checks, in order: square shape, elementwise hermiticity, unit trace,
    positive semidefiniteness of the Hermitian part, and the principal-minor
    element bound |rho_ac|^2 <= rho_aa * rho_cc.
    """
    a = np.asarray(rho, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {a.shape}")
    herm_dev = float(np.max(np.abs(a - a.conj().T)))
    if herm_dev > hermiticity_tol:
        raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm_dev:.3e}")
    tr_dev = abs(np.trace(a) - 1.0)
    if tr_dev > trace_tol:
        raise ValueError(f"trace deviates from 1 by {tr_dev:.3e}")
    w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    if w[0] < -psd_tol:
        raise ValueError(f"not positive semidefinite: min eigenvalue {w[0]:.3e}")
    d = np.real(np.diagonal(a))
    bound_dev = float(np.max(np.abs(a) ** 2 - np.outer(d, d)))
    if bound_dev > element_tol:
        raise ValueError(
            f"element bound |rho_ac|^2 <= rho_aa rho_cc violated by {bound_dev:.3e}"
        )


def is_density_matrix(rho: np.ndarray, **tols: float) -> bool:
    """Boolean companion of :func:`check_density_matrix`."""
    try:
        check_density_matrix(rho, **tols)
    except ValueError:
        return False
    return True
