"""Memory measures: how much the final state of A still depends on lam.

Each measure is the normalized Frobenius norm of the derivative of the final
state lam~ with respect to one (real) degree of freedom of the initial state,
so 1 means the dependence of an untouched channel and 0 means full erasure.
Because lam~ is linear in lam, every derivative is a fixed combination of
memory operators Theta_{pr} and the measures have closed forms:

    off-diagonal pair (a, c):   ||Theta_{ac}||
    real part of lam_{ab}:      ||Theta_{ab} + Theta_{ba}|| / sqrt(2)
    imaginary part of lam_{ab}: ||Theta_{ab} - Theta_{ba}|| / sqrt(2)
    difference lam_aa - lam_bb: ||Theta_{aa} - Theta_{bb}|| / sqrt(2)

All indices are 1-based.  :func:`memory_fd_oracle` recomputes the pair
measure from finite differences of actual channel outputs and must agree
with the closed form to near machine precision.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import StinespringTensor, _require_isometric, _theta, output_state_a
from .linalg import frobenius_norm

_SQRT2 = np.sqrt(2.0)


def _check_pair(n: int, a: int, b: int) -> tuple[int, int]:
    if not (1 <= a <= n and 1 <= b <= n):
        raise ValueError(f"indices must lie in 1..{n}, got ({a}, {b})")
    if a == b:
        raise ValueError(f"indices must differ, got ({a}, {b})")
    return a - 1, b - 1


def memory_offdiag(t: StinespringTensor, a: int, c: int) -> float:
    """Memory ||Theta_{ac}|| on the off-diagonal element lam_{ac}, a != c."""
    i, j = _check_pair(t.n, a, c)
    _require_isometric(t)
    return frobenius_norm(_theta(t.vectors, i, j))


def memory_component(t: StinespringTensor, a: int, b: int, kind: str) -> float:
    """Memory on one real component (real or imaginary part) of lam_{ab}."""
    i, j = _check_pair(t.n, a, b)
    _require_isometric(t)
    v = t.vectors
    tab, tba = _theta(v, i, j), _theta(v, j, i)
    if kind in ("real", "real-part"):
        return frobenius_norm(tab + tba) / _SQRT2
    if kind in ("imag", "imaginary-part"):
        return frobenius_norm(tab - tba) / _SQRT2
    raise ValueError(f"unknown component kind {kind!r}")


def memory_diag_diff(t: StinespringTensor, a: int, b: int) -> float:
    """Memory on the diagonal difference lam_aa - lam_bb."""
    i, j = _check_pair(t.n, a, b)
    _require_isometric(t)
    v = t.vectors
    return frobenius_norm(_theta(v, i, i) - _theta(v, j, j)) / _SQRT2


def memory_fd_oracle(t: StinespringTensor, a: int, c: int, h: float = 1e-3) -> float:
    """Pair memory recomputed by finite differences of channel outputs.

    Perturbs the maximally mixed state along the real and imaginary
    directions of lam_{ac} and combines the two difference quotients:

        (1/2) sqrt(||D_re||^2 + ||D_im||^2).

    The channel is linear, so this equals :func:`memory_offdiag` up to
    floating-point error regardless of h; the step only controls rounding.
    """
    i, j = _check_pair(t.n, a, c)
    if not (0.0 < h <= 1e-3):
        raise ValueError(f"step must lie in (0, 1e-3], got {h}")
    n = t.n
    base = np.eye(n, dtype=complex) / n
    d_re = np.zeros((n, n), dtype=complex)
    d_re[i, j] = d_re[j, i] = 1.0
    d_im = np.zeros((n, n), dtype=complex)
    d_im[i, j] = 1.0j
    d_im[j, i] = -1.0j
    out0 = output_state_a(t, base)
    g_re = (output_state_a(t, base + h * d_re) - out0) / h
    g_im = (output_state_a(t, base + h * d_im) - out0) / h
    return 0.5 * float(np.sqrt(frobenius_norm(g_re) ** 2 + frobenius_norm(g_im) ** 2))


# ---------------------------------------------------------------------------
# Full report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MemoryReport:
    """All memory measures of one channel.

    Matrices are n x n with row/column i describing element index i + 1.
    offdiag[a, c] is the pair memory for a != c (diagonal entries are zero);
    re_part/im_part/diag_diff are symmetric with zero diagonal.
    """

    n: int
    offdiag: np.ndarray
    re_part: np.ndarray
    im_part: np.ndarray
    diag_diff: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "offdiag": self.offdiag.tolist(),
            "re_part": self.re_part.tolist(),
            "im_part": self.im_part.tolist(),
            "diag_diff": self.diag_diff.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def full_report(t: StinespringTensor) -> MemoryReport:
    """Evaluate every memory measure of an isometric tensor."""
    _require_isometric(t)
    n, v = t.n, t.vectors
    th = np.einsum("rmlc,pklc->prkm", v.conj(), v)  # th[p, r] = Theta_{p+1, r+1}
    offdiag = np.zeros((n, n))
    re_part = np.zeros((n, n))
    im_part = np.zeros((n, n))
    diag_diff = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            offdiag[i, j] = np.linalg.norm(th[i, j])
            re_part[i, j] = np.linalg.norm(th[i, j] + th[j, i]) / _SQRT2
            im_part[i, j] = np.linalg.norm(th[i, j] - th[j, i]) / _SQRT2
            diag_diff[i, j] = np.linalg.norm(th[i, i] - th[j, j]) / _SQRT2
    return MemoryReport(n, offdiag, re_part, im_part, diag_diff)
