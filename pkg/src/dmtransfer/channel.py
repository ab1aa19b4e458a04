"""Transfer channels between two n-level systems, in Stinespring form.

A channel is stored as the family of ancilla vectors C^p_{kl} (length dim_c)
defined by the action of a dilation unitary on product inputs,

    U |p> (x) |1_B> (x) |anc>  =  sum_{k,l} |k> (x) |l_B> (x) |C^p_{kl}>,

where A starts in an arbitrary state, B starts in its first basis state, and
the ancilla starts in a fixed pure state.  Only these n composite vectors
(the isometry slice of U) are stored; the rest of U never enters any output.

Indices p, k (system A) and l (system B) are 1-based at the public API and
0-based on the underlying array, which has shape (n, n, n, dim_c) and is
indexed as vectors[p, k, l, c].

The reduced final states follow by partial trace:

    final A:  lam~ = sum_{p,r} lam_{pr} Theta_{pr},
              Theta_{pr}[k, m] = sum_l <C^r_{ml} | C^p_{kl}>,
    final B:  r~_{ab} = sum_{p,r} lam_{pr} sum_k <C^r_{kb} | C^p_{ka}>.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .linalg import frobenius_norm  # noqa: F401  (re-exported convenience)

ISOMETRY_TOL = 1e-8


@dataclass(frozen=True)
class StinespringTensor:
    """Immutable ancilla-vector family C^p_{kl} of a transfer channel.

    vectors has shape (n, n, n, dim_c): first axis p (input basis state of A),
    second axis k (output basis of A), third axis l (output basis of B), last
    axis the ancilla component.  The array is copied and frozen on creation.
    """

    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 4:
            raise ValueError(f"vectors must be 4-dimensional, got ndim {v.ndim}")
        n = v.shape[0]
        if v.shape[1] != n or v.shape[2] != n:
            raise ValueError(
                f"first three axes must have equal length, got shape {v.shape}"
            )
        if v.shape[3] < 1:
            raise ValueError("ancilla dimension must be >= 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("vectors must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim_c(self) -> int:
        return self.vectors.shape[3]


# ---------------------------------------------------------------------------
# Reference channels
# ---------------------------------------------------------------------------

def identity_tensor(n: int, dim_c: int = 1) -> StinespringTensor:
    """Channel that leaves A untouched: C^p_{kl} = delta_{kp} delta_{l1} e_1."""
    v = np.zeros((n, n, n, dim_c), dtype=complex)
    for p in range(n):
        v[p, p, 0, 0] = 1.0
    return StinespringTensor(v)


def swap_tensor(n: int, dim_c: int = 1) -> StinespringTensor:
    """Channel that swaps A into B: C^p_{kl} = delta_{k1} delta_{lp} e_1.

    A is reset to its first basis state and B receives the full initial state.
    """
    v = np.zeros((n, n, n, dim_c), dtype=complex)
    for p in range(n):
        v[p, 0, p, 0] = 1.0
    return StinespringTensor(v)


# ---------------------------------------------------------------------------
# Isometry / memory operator / output states
# ---------------------------------------------------------------------------

def gram_matrix(t: StinespringTensor) -> np.ndarray:
    """Overlaps G[p, r] = sum_{kl} <C^p_{kl} | C^r_{kl}> of the slice vectors."""
    v = t.vectors
    return np.einsum("pklc,rklc->pr", v.conj(), v)


def isometry_residual(t: StinespringTensor) -> float:
    """Max deviation of the slice overlaps from orthonormality.

    Zero iff the stored slices extend to a dilation unitary.
    """
    g = gram_matrix(t)
    return float(np.max(np.abs(g - np.eye(t.n))))


def _require_isometric(t: StinespringTensor, tol: float = ISOMETRY_TOL) -> None:
    r = isometry_residual(t)
    if r > tol:
        raise ValueError(f"tensor is not isometric: residual {r:.3e} > {tol:.1e}")


def _theta(v: np.ndarray, p: int, r: int) -> np.ndarray:
    """0-based memory operator Theta_{pr}[k, m] = sum_{lc} conj(C^r_{mlc}) C^p_{klc}."""
    return np.einsum("mlc,klc->km", v[r].conj(), v[p])


def theta(t: StinespringTensor, p: int, r: int) -> np.ndarray:
    """Memory operator Theta_{pr} (1-based p, r).

    The final state of A is the double sum of lam_{pr} Theta_{pr}, so
    Theta_{pr} is the exact sensitivity of the final state to the initial
    element lam_{pr}.  Satisfies Theta_{pr} = Theta_{rp}^dag for any tensor
    and tr Theta_{pr} = delta_{pr} for isometric ones.
    """
    n = t.n
    if not (1 <= p <= n and 1 <= r <= n):
        raise ValueError(f"indices must lie in 1..{n}, got p={p}, r={r}")
    return _theta(t.vectors, p - 1, r - 1)


def output_state_a(t: StinespringTensor, lam: np.ndarray) -> np.ndarray:
    """Final reduced state of A for initial state lam of A."""
    a = np.asarray(lam, dtype=complex)
    if a.shape != (t.n, t.n):
        raise ValueError(f"initial state must have shape {(t.n, t.n)}, got {a.shape}")
    _require_isometric(t)
    v = t.vectors
    return np.einsum("pr,pklc,rmlc->km", a, v, v.conj())


def output_state_b(t: StinespringTensor, lam: np.ndarray) -> np.ndarray:
    """Final reduced state of B for initial state lam of A."""
    a = np.asarray(lam, dtype=complex)
    if a.shape != (t.n, t.n):
        raise ValueError(f"initial state must have shape {(t.n, t.n)}, got {a.shape}")
    _require_isometric(t)
    v = t.vectors
    return np.einsum("pr,pkac,rkbc->ab", a, v, v.conj())


def apply_output_unitary(t: StinespringTensor, u: np.ndarray) -> StinespringTensor:
    """Post-compose the channel with a unitary on A (acts on the k index).

    The final state of A becomes u lam~ u^dag; all memory norms are unchanged.
    """
    w = np.asarray(u, dtype=complex)
    if w.shape != (t.n, t.n):
        raise ValueError(f"unitary must have shape {(t.n, t.n)}, got {w.shape}")
    return StinespringTensor(np.einsum("kj,pjlc->pklc", w, t.vectors))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------
# JSON layout: {"n": int, "dim_c": int, "vectors": [[re, im], ...]} with the
# [re, im] pairs flattened in (p, k, l, c)-major order (p slowest, c fastest).
# Floats are emitted via repr, so a load reproduces the array bit-exactly.

def tensor_to_dict(t: StinespringTensor) -> dict:
    flat = t.vectors.ravel(order="C")
    return {
        "n": t.n,
        "dim_c": t.dim_c,
        "vectors": [[float(z.real), float(z.imag)] for z in flat],
    }


def tensor_from_dict(d: dict) -> StinespringTensor:
    if not isinstance(d, dict):
        raise ValueError("tensor document must be an object")
    extra = set(d) - {"n", "dim_c", "vectors"}
    if extra:
        raise ValueError(f"unknown tensor fields: {sorted(extra)}")
    try:
        n = int(d["n"])
        dim_c = int(d["dim_c"])
        pairs = d["vectors"]
    except KeyError as exc:
        raise ValueError(f"missing tensor field: {exc.args[0]}") from None
    if n < 1 or dim_c < 1:
        raise ValueError(f"invalid dimensions n={n}, dim_c={dim_c}")
    if len(pairs) != n * n * n * dim_c:
        raise ValueError(
            f"expected {n * n * n * dim_c} vector entries, got {len(pairs)}"
        )
    flat = np.array([complex(re, im) for re, im in pairs], dtype=complex)
    return StinespringTensor(flat.reshape(n, n, n, dim_c))


def tensor_to_json(t: StinespringTensor) -> str:
    return json.dumps(tensor_to_dict(t))


def tensor_from_json(s: str) -> StinespringTensor:
    return tensor_from_dict(json.loads(s))


def save_tensor(t: StinespringTensor, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(tensor_to_json(t))


def load_tensor(path: str) -> StinespringTensor:
    with open(path, "r", encoding="utf-8") as fh:
        return tensor_from_json(fh.read())
