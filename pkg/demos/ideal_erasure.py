"""Ideal transfer erases memory: the theorems, checked on explicit channels.

When an element of A's state is transferred to B exactly (accuracy 1), A's
output can keep no memory of certain elements:

  * diagonal transfer lam_aa -> r~_aa erases every pair memory (a, c);
  * off-diagonal transfer lam_ab -> r~_ab erases the pair memory (a, b)
    and the diagonal-difference memory (a, b);
  * of the triple Re lam_ab, Im lam_ab, lam_aa - lam_bb, transferring any
    one ideally erases the memory of the other two.

The checks below run the erasure verifier on the ideal limits of the three
optimal constructions, then show that erasure does not mean A's output is
diagonal or otherwise trivial.
"""

import numpy as np

from dmtransfer import (
    StinespringTensor,
    TransferSpec,
    construct_diag_optimal,
    construct_diagdiff_optimal,
    construct_offdiag_optimal,
    output_state_a,
    verify_ideal_theorems,
)

np.set_printoptions(precision=4, suppress=True)


def show(report):
    for check in report.checks:
        tag = "ok " if check.passed else "BAD"
        print(f"  [{tag}] {check.description}: {check.measured:.2e}")


print("ideal diagonal transfer of elements 1 and 2 (three-level channel)")
t = construct_diag_optimal(1.0, 1.0)
show(verify_ideal_theorems(t, TransferSpec.diagonal(((1, 1.0), (2, 1.0)))))

print("\nideal off-diagonal transfer of element (2, 1)")
t = construct_offdiag_optimal(3, 1.0)
show(verify_ideal_theorems(t, TransferSpec.offdiagonal(2, 1, 1.0)))

print("\nideal off-diagonal transfer of element (1, 2), difference-optimal form")
t = construct_diagdiff_optimal(1.0)
show(verify_ideal_theorems(t, TransferSpec.offdiagonal(1, 2, 1.0)))

# --- erasure is not diagonality -------------------------------------------
# A channel that ideally transfers the diagonal element lam_11 must lose all
# pair memories (1, c), yet its output on A can still carry coherences: they
# just cannot depend on the erased elements.
v = np.zeros((2, 2, 2, 1), dtype=complex)
v[0, 0, 0, 0] = 1 / np.sqrt(2)
v[0, 1, 0, 0] = 1 / np.sqrt(2)
v[1, 0, 1, 0] = 1.0
t = StinespringTensor(v)
spec = TransferSpec.diagonal(((1, 1.0),))
report = verify_ideal_theorems(t, spec)
print("\na channel transferring lam_11 ideally, with a non-diagonal output:")
show(report)
lam = np.diag([0.25, 0.75]).astype(complex)
print("input (diagonal):")
print(lam)
print("A's output (coherent, but independent of the erased elements):")
print(output_state_a(t, lam))
