"""Walk through the channel model: tensors, output states, memory report.

A channel from system A (n levels) to system B is specified by a Stinespring
tensor V[p, k, l, c]: the ancilla vectors attached to each transition
|p> -> |k> of A with B ending in level l and the ancilla in state c.  This
script builds a few channels, pushes a random density matrix through them,
and prints how much memory of each input element survives in A's output.
"""

import numpy as np

from dmtransfer import (
    construct_offdiag_optimal,
    full_report,
    identity_tensor,
    isometry_residual,
    output_state_a,
    output_state_b,
    random_density_matrix,
    swap_tensor,
    theta,
)

np.set_printoptions(precision=4, suppress=True)

n = 3
lam = random_density_matrix(n, seed=1)
print("input state of A:")
print(lam)

# --- the do-nothing channel -----------------------------------------------
ident = identity_tensor(n)
print("\nidentity channel: isometry residual", isometry_residual(ident))
print("A's output equals the input:", np.allclose(output_state_a(ident, lam), lam))

# --- the swap channel ------------------------------------------------------
# B receives A's state wholesale; A is reset and remembers nothing.
swap = swap_tensor(n)
print("\nswap channel: B's output equals the input:",
      np.allclose(output_state_b(swap, lam), lam))
print("A's output (state-independent):")
print(output_state_a(swap, lam))

# --- a partial transfer ----------------------------------------------------
# Transfer the element lam_21 with accuracy 0.6 while keeping as much
# memory of it as possible in A.
t = construct_offdiag_optimal(n, 0.6)
out_a = output_state_a(t, lam)
out_b = output_state_b(t, lam)
print("\npartial transfer r~_21 = 0.6 lam_21")
print("B output element (2,1):", out_b[1, 0], " = 0.6 *", lam[1, 0])
print("A output:")
print(out_a)

# The memory operator Theta_pr is the coefficient of lam_pr in A's output.
th = theta(t, 1, 2)
print("\nTheta_12 (coefficient of lam_12 in A's output):")
print(th)

# One number per element pair: the Euclidean norms of the Theta combinations.
report = full_report(t)
print("\nmemory report (rows/cols are elements 1..n):")
print("pair memories:\n", report.offdiag)
print("diagonal-difference memories:\n", report.diag_diff)
