"""Transfer constraints, accuracy-memory bounds, and saturating channels.

A :class:`TransferSpec` pins selected elements (or real components) of B's
final state to scaled copies of the corresponding initial elements of A,
for every initial state.  Writing K_ab[p, r] for the coefficient of lam_{pr}
in r~_{ab} (so r~_{ab} = sum_{pr} lam_{pr} K_ab[p, r]), the constraint
families are elementwise over all (p, r):

    diagonal, element u, accuracy eps:   K_uu[p, r] = eps delta_{pr} delta_{pu}
    off-diagonal (a, b), accuracy eta:   K_ab[p, r] = eta delta_{pa} delta_{rb}
    real part (a, b), accuracy eta:      K_ab[p, r] + conj(K_ab[r, p])
                                           = eta (delta_{pa} delta_{rb} + delta_{pb} delta_{ra})
    imaginary part (a, b), accuracy eta: K_ab[p, r] - conj(K_ab[r, p])
                                           = eta (delta_{pa} delta_{rb} - delta_{pb} delta_{ra})
    diagonal difference (a, b):          (K_aa - K_bb)[p, r]
                                           = eta (delta_{pa} delta_{ra} - delta_{pb} delta_{rb})

Each family is exactly what "the transfer holds for every initial state"
forces; :func:`transfer_residual` reports the worst deviation.

The closed-form bounds restrict how much memory any constrained channel can
keep, and the construct_* channels attain them with equality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import StinespringTensor
from .memory import memory_component, memory_diag_diff, memory_offdiag

KINDS = ("diagonal", "offdiagonal", "real-part", "imaginary-part", "diag-difference")

THEOREM_PRECONDITION_TOL = 1e-12


# ---------------------------------------------------------------------------
# Transfer specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransferSpec:
    """Which elements of B's final state must copy A's initial elements.

    kind: one of KINDS.
    indices: for "diagonal", a tuple of element indices (1-based); otherwise
        a tuple of (a, b) pairs with a != b.
    accuracy: one factor per index entry.  Off-diagonal accuracies may be
        complex with 0 < |eta| <= 1; all other kinds require real values in
        (0, 1].
    """

    kind: str
    indices: tuple = field(default=())
    accuracy: tuple = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown transfer kind {self.kind!r}")
        idx = tuple(self.indices)
        acc = tuple(self.accuracy)
        if len(idx) == 0:
            raise ValueError("spec must constrain at least one element")
        if len(idx) != len(acc):
            raise ValueError(
                f"{len(idx)} indices but {len(acc)} accuracy values"
            )
        if self.kind == "diagonal":
            idx = tuple(int(u) for u in idx)
            for u in idx:
                if u < 1:
                    raise ValueError(f"element index must be >= 1, got {u}")
            acc = tuple(float(e) for e in acc)
            for e in acc:
                if not (0.0 < e <= 1.0):
                    raise ValueError(f"accuracy must lie in (0, 1], got {e}")
        else:
            pairs = []
            for pair in idx:
                a, b = (int(pair[0]), int(pair[1]))
                if a < 1 or b < 1:
                    raise ValueError(f"element indices must be >= 1, got ({a}, {b})")
                if a == b:
                    raise ValueError(f"pair indices must differ, got ({a}, {b})")
                pairs.append((a, b))
            idx = tuple(pairs)
            if self.kind == "offdiagonal":
                acc = tuple(complex(e) for e in acc)
                for e in acc:
                    if not (0.0 < abs(e) <= 1.0):
                        raise ValueError(
                            f"accuracy modulus must lie in (0, 1], got |{e}| = {abs(e)}"
                        )
            else:
                for e in acc:
                    if isinstance(e, complex) and e.imag != 0.0:
                        raise ValueError(
                            f"{self.kind} accuracy must be real, got {e}"
                        )
                acc = tuple(float(np.real(e)) for e in acc)
                for e in acc:
                    if not (0.0 < e <= 1.0):
                        raise ValueError(f"accuracy must lie in (0, 1], got {e}")
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate indices in {idx}")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "accuracy", acc)

    # -- constructors ------------------------------------------------------
    @classmethod
    def diagonal(cls, elements: list[tuple[int, float]]) -> "TransferSpec":
        """Diagonal transfer r~_uu = eps_u lam_uu from (index, accuracy) pairs."""
        return cls("diagonal", tuple(u for u, _ in elements), tuple(e for _, e in elements))

    @classmethod
    def offdiagonal(cls, a: int, b: int, eta: complex) -> "TransferSpec":
        """Off-diagonal transfer r~_ab = eta lam_ab."""
        return cls("offdiagonal", ((a, b),), (eta,))

    @classmethod
    def real_part(cls, a: int, b: int, eta: float) -> "TransferSpec":
        """Component transfer Re r~_ab = eta Re lam_ab."""
        return cls("real-part", ((a, b),), (eta,))

    @classmethod
    def imaginary_part(cls, a: int, b: int, eta: float) -> "TransferSpec":
        """Component transfer Im r~_ab = eta Im lam_ab."""
        return cls("imaginary-part", ((a, b),), (eta,))

    @classmethod
    def diag_difference(cls, a: int, b: int, eta: float) -> "TransferSpec":
        """Difference transfer r~_aa - r~_bb = eta (lam_aa - lam_bb)."""
        return cls("diag-difference", ((a, b),), (eta,))

    # -- helpers -----------------------------------------------------------
    def validate_for_dimension(self, n: int) -> None:
        """Check indices fit an n-level system; diagonal specs keep one level free."""
        if self.kind == "diagonal":
            if max(self.indices) > n:
                raise ValueError(f"element index {max(self.indices)} exceeds n={n}")
            if len(self.indices) > n - 1:
                raise ValueError(
                    f"at most n-1={n - 1} independent diagonal elements, got {len(self.indices)}"
                )
        else:
            for a, b in self.indices:
                if a > n or b > n:
                    raise ValueError(f"pair ({a}, {b}) exceeds n={n}")

    def as_ideal(self) -> "TransferSpec":
        """Same spec with every accuracy replaced by 1."""
        return replace(self, accuracy=tuple(1.0 for _ in self.accuracy))

    def first_pair(self) -> tuple[int, int]:
        if self.kind == "diagonal":
            raise ValueError("diagonal spec has no element pair")
        return self.indices[0]

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        if self.kind == "diagonal":
            idx: list = list(self.indices)
            acc = [float(e) for e in self.accuracy]
        else:
            idx = [list(p) for p in self.indices]
            acc = [
                [e.real, e.imag] if isinstance(e, complex) and e.imag != 0.0 else float(np.real(e))
                for e in self.accuracy
            ]
        return {"kind": self.kind, "indices": idx, "accuracy": acc}

    @classmethod
    def from_dict(cls, d: dict) -> "TransferSpec":
        if not isinstance(d, dict):
            raise ValueError("transfer spec must be an object")
        extra = set(d) - {"kind", "indices", "accuracy"}
        if extra:
            raise ValueError(f"unknown transfer fields: {sorted(extra)}")
        for key in ("kind", "indices", "accuracy"):
            if key not in d:
                raise ValueError(f"missing transfer field: {key}")
        kind = d["kind"]
        raw_idx = d["indices"]
        if not isinstance(raw_idx, list):
            raw_idx = [raw_idx]
        indices = tuple(tuple(i) if isinstance(i, (list, tuple)) else int(i) for i in raw_idx)
        raw_acc = d["accuracy"]
        if not isinstance(raw_acc, list) or (
            len(raw_acc) == 2 and all(isinstance(x, (int, float)) for x in raw_acc) and len(indices) != 2
        ):
            raw_acc = [raw_acc]
        accuracy = tuple(
            complex(x[0], x[1]) if isinstance(x, (list, tuple)) else float(x) for x in raw_acc
        )
        return cls(kind, indices, accuracy)


# ---------------------------------------------------------------------------
# Constraint residuals
# ---------------------------------------------------------------------------

def _transfer_matrix(v: np.ndarray, a: int, b: int) -> np.ndarray:
    """K_ab[p, r] = sum_{kc} conj(C^r_{kbc}) C^p_{kac} (0-based a, b)."""
    return np.einsum("rkc,pkc->pr", v[:, :, b, :].conj(), v[:, :, a, :])


def _constraint_deviations(v: np.ndarray, spec: TransferSpec) -> list[np.ndarray]:
    """Deviation matrices (one per constrained element), zero iff the spec holds."""
    n = v.shape[0]
    devs = []
    if spec.kind == "diagonal":
        for u1, eps in zip(spec.indices, spec.accuracy):
            u = u1 - 1
            target = np.zeros((n, n), dtype=complex)
            target[u, u] = eps
            devs.append(_transfer_matrix(v, u, u) - target)
        return devs
    for (a1, b1), eta in zip(spec.indices, spec.accuracy):
        a, b = a1 - 1, b1 - 1
        if spec.kind == "offdiagonal":
            target = np.zeros((n, n), dtype=complex)
            target[a, b] = eta
            devs.append(_transfer_matrix(v, a, b) - target)
        elif spec.kind == "real-part":
            k = _transfer_matrix(v, a, b)
            target = np.zeros((n, n), dtype=complex)
            target[a, b] = eta
            target[b, a] = eta
            devs.append(k + k.conj().T - target)
        elif spec.kind == "imaginary-part":
            k = _transfer_matrix(v, a, b)
            target = np.zeros((n, n), dtype=complex)
            target[a, b] = eta
            target[b, a] = -eta
            devs.append(k - k.conj().T - target)
        else:  # diag-difference
            target = np.zeros((n, n), dtype=complex)
            target[a, a] = eta
            target[b, b] = -eta
            devs.append(_transfer_matrix(v, a, a) - _transfer_matrix(v, b, b) - target)
    return devs


def transfer_residual(t: StinespringTensor, spec: TransferSpec) -> float:
    """Worst absolute deviation of the channel from the transfer constraints.

    Zero means the prescribed transfer holds exactly for every initial state.
    """
    spec.validate_for_dimension(t.n)
    devs = _constraint_deviations(t.vectors, spec)
    return float(max(np.max(np.abs(m)) for m in devs))


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def bound_diag(eps_a: float, eps_b: float, pair_kind: str) -> float:
    """Max pair memory under diagonal transfer of elements a and b.

    pair_kind selects the pair: "cross" for (a, b) with both elements
    transferred, "outside-a"/"outside-b" for a pair containing only one.
    """
    for e in (eps_a, eps_b):
        if not (0.0 < e <= 1.0):
            raise ValueError(f"accuracy must lie in (0, 1], got {e}")
    if pair_kind == "cross":
        return math.sqrt((1.0 - eps_a) * (1.0 - eps_b))
    if pair_kind == "outside-a":
        return math.sqrt(1.0 - eps_a)
    if pair_kind == "outside-b":
        return math.sqrt(1.0 - eps_b)
    raise ValueError(f"unknown pair kind {pair_kind!r}")


def bound_offdiag(eta_abs: float) -> float:
    """Max pair memory ||Theta_ab|| under off-diagonal transfer with |eta|."""
    if not (0.0 < eta_abs <= 1.0):
        raise ValueError(f"accuracy modulus must lie in (0, 1], got {eta_abs}")
    return math.sqrt(1.0 - eta_abs**2)


def bound_diagdiff(eps: float) -> float:
    """Max diagonal-difference memory under off-diagonal transfer with |eta| = eps."""
    if not (0.0 < eps <= 1.0):
        raise ValueError(f"accuracy must lie in (0, 1], got {eps}")
    return math.sqrt(1.0 - eps**2)


def analytic_bound(spec: TransferSpec, objective_kind: str, pair: tuple[int, int]) -> float:
    """Best known upper bound on an objective for channels satisfying spec.

    Falls back on the universal cap (1 for memories, 1 for squared memory)
    when no sharper bound applies to the requested pair.
    """
    a, b = pair
    if spec.kind == "diagonal":
        eps = dict(zip(spec.indices, spec.accuracy))
        if objective_kind in ("offdiag", "offdiag_sq"):
            if a in eps and b in eps:
                val = bound_diag(eps[a], eps[b], "cross")
            elif a in eps:
                val = bound_diag(eps[a], eps[a], "outside-a")
            elif b in eps:
                val = bound_diag(eps[b], eps[b], "outside-b")
            else:
                val = 1.0
            return val**2 if objective_kind == "offdiag_sq" else val
        return 1.0
    if spec.kind == "offdiagonal":
        pairs = {frozenset(p): abs(e) for p, e in zip(spec.indices, spec.accuracy)}
        key = frozenset(pair)
        if key in pairs:
            if objective_kind == "offdiag":
                return bound_offdiag(pairs[key])
            if objective_kind == "offdiag_sq":
                return bound_offdiag(pairs[key]) ** 2
            if objective_kind == "diag_diff":
                return bound_diagdiff(pairs[key])
        return 1.0
    return 1.0


# ---------------------------------------------------------------------------
# Saturating constructions (all with dim_c = 1)
# ---------------------------------------------------------------------------

def construct_diag_optimal(eps_1: float, eps_2: float) -> StinespringTensor:
    """Three-level channel transferring both diagonals with maximal memory.

    Satisfies the diagonal spec {(1, eps_1), (2, eps_2)} exactly and attains
    every diagonal bound with equality: pair (1, 2) keeps
    sqrt((1-eps_1)(1-eps_2)), pairs (1, 3) and (2, 3) keep sqrt(1-eps_1) and
    sqrt(1-eps_2).
    """
    for e in (eps_1, eps_2):
        if not (0.0 < e <= 1.0):
            raise ValueError(f"accuracy must lie in (0, 1], got {e}")
    v = np.zeros((3, 3, 3, 1), dtype=complex)
    v[0, 0, 0, 0] = math.sqrt(eps_1)
    v[0, 0, 2, 0] = math.sqrt(1.0 - eps_1)
    v[1, 1, 1, 0] = math.sqrt(eps_2)
    v[1, 1, 2, 0] = math.sqrt(1.0 - eps_2)
    v[2, 2, 2, 0] = 1.0
    return StinespringTensor(v)


def construct_offdiag_optimal(n: int, eta: complex) -> StinespringTensor:
    """n-level channel transferring r~_21 = eta lam_21 with maximal memory.

    Attains the off-diagonal bound: ||Theta_12|| = sqrt(1 - |eta|^2), with
    Theta_12 = sqrt(1 - |eta|^2) |1><2|.  Basis states beyond the first two
    are mapped as by the untouched channel, which leaves the constraints and
    the active block unchanged.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    eta = complex(eta)
    if not (0.0 < abs(eta) <= 1.0):
        raise ValueError(f"accuracy modulus must lie in (0, 1], got {abs(eta)}")
    v = np.zeros((n, n, n, 1), dtype=complex)
    v[0, 0, 0, 0] = 1.0
    v[1, 1, 0, 0] = math.sqrt(1.0 - abs(eta) ** 2)
    v[1, 0, 1, 0] = eta
    for p in range(2, n):
        v[p, p, 0, 0] = 1.0
    return StinespringTensor(v)


def construct_diagdiff_optimal(eps: float) -> StinespringTensor:
    """Three-level channel with maximal diagonal-difference memory.

    Satisfies the off-diagonal spec r~_12 = eps lam_12 exactly (and transfers
    both diagonals untouched), keeps no memory of lam_12 itself, and attains
    the difference bound: diagonal-difference memory sqrt(1 - eps^2) on the
    pair (1, 2).  The three slices are orthonormal as given, so no further
    completion of the dilation unitary is needed.
    """
    if not (0.0 < eps <= 1.0):
        raise ValueError(f"accuracy must lie in (0, 1], got {eps}")
    v = np.zeros((3, 3, 3, 1), dtype=complex)
    v[0, 0, 0, 0] = 1.0
    v[1, 0, 1, 0] = eps
    v[1, 2, 1, 0] = math.sqrt(1.0 - eps**2)
    v[2, 0, 2, 0] = 1.0
    return StinespringTensor(v)


# ---------------------------------------------------------------------------
# Erasure-theorem checker
# ---------------------------------------------------------------------------

def erasure_budget(tol: float) -> float:
    """Memory allowance g(tol) = 10 sqrt(tol) for a transfer ideal within tol.

    Constraint violations enter the slice vectors through quadratic forms, so
    memories that vanish for an exact ideal transfer may grow like sqrt(tol).
    """
    return 10.0 * math.sqrt(tol)


@dataclass(frozen=True)
class TheoremCheck:
    description: str
    measured: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.threshold)

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "measured": float(self.measured),
            "threshold": float(self.threshold),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class TheoremReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def verify_ideal_theorems(
    t: StinespringTensor, spec: TransferSpec, tol: float = THEOREM_PRECONDITION_TOL
) -> TheoremReport:
    """Check every erasure implied by an ideal version of the given transfer.

    Requires the channel to satisfy the spec with all accuracies set to 1
    within tol (raises ValueError otherwise).  Implied erasures, each checked
    against the budget g(tol):

        diagonal, element a:      all pair memories (a, c) vanish
        off-diagonal (a, b):      pair memory (a, b) and the diagonal
                                  difference (a, b) vanish
        real part (a, b):         imaginary-part and difference memories vanish
        imaginary part (a, b):    real-part and difference memories vanish
        difference (a, b):        both component memories vanish

    The last three implement the one-of-three rule for the components
    (Re lam_ab, Im lam_ab, lam_aa - lam_bb): ideally transferring any one
    erases the memory of the other two.
    """
    spec.validate_for_dimension(t.n)
    ideal = spec.as_ideal()
    residual = transfer_residual(t, ideal)
    if residual > tol:
        raise ValueError(
            f"channel is not an ideal {spec.kind} transfer: residual {residual:.3e} > {tol:.1e}"
        )
    g = erasure_budget(tol)
    checks: list[TheoremCheck] = []
    if spec.kind == "diagonal":
        for u in spec.indices:
            for c in range(1, t.n + 1):
                if c == u:
                    continue
                checks.append(
                    TheoremCheck(
                        f"ideal diagonal transfer of {u} erases pair memory ({u}, {c})",
                        memory_offdiag(t, u, c),
                        g,
                    )
                )
    elif spec.kind == "offdiagonal":
        for a, b in spec.indices:
            checks.append(
                TheoremCheck(
                    f"ideal off-diagonal transfer ({a}, {b}) erases pair memory ({a}, {b})",
                    memory_offdiag(t, a, b),
                    g,
                )
            )
            checks.append(
                TheoremCheck(
                    f"ideal off-diagonal transfer ({a}, {b}) erases difference memory ({a}, {b})",
                    memory_diag_diff(t, a, b),
                    g,
                )
            )
    elif spec.kind == "real-part":
        for a, b in spec.indices:
            checks.append(
                TheoremCheck(
                    f"ideal real-part transfer ({a}, {b}) erases imaginary-part memory",
                    memory_component(t, a, b, "imag"),
                    g,
                )
            )
            checks.append(
                TheoremCheck(
                    f"ideal real-part transfer ({a}, {b}) erases difference memory",
                    memory_diag_diff(t, a, b),
                    g,
                )
            )
    elif spec.kind == "imaginary-part":
        for a, b in spec.indices:
            checks.append(
                TheoremCheck(
                    f"ideal imaginary-part transfer ({a}, {b}) erases real-part memory",
                    memory_component(t, a, b, "real"),
                    g,
                )
            )
            checks.append(
                TheoremCheck(
                    f"ideal imaginary-part transfer ({a}, {b}) erases difference memory",
                    memory_diag_diff(t, a, b),
                    g,
                )
            )
    else:  # diag-difference
        for a, b in spec.indices:
            checks.append(
                TheoremCheck(
                    f"ideal difference transfer ({a}, {b}) erases real-part memory",
                    memory_component(t, a, b, "real"),
                    g,
                )
            )
            checks.append(
                TheoremCheck(
                    f"ideal difference transfer ({a}, {b}) erases imaginary-part memory",
                    memory_component(t, a, b, "imag"),
                    g,
                )
            )
    return TheoremReport(tuple(checks))
