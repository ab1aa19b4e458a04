"""Accuracy versus memory: sweep the trade-off curves and their bounds.

Transferring an element more accurately forces A to forget more.  For each
transfer kind there is a sharp bound on the surviving memory, and an explicit
channel that attains it:

    diagonal pair:        ||Theta_12|| <= sqrt((1 - eps_1)(1 - eps_2))
    off-diagonal pair:    ||Theta_12|| <= sqrt(1 - |eta|^2)
    diagonal difference:  ||(Theta_11 - Theta_22)/sqrt(2)|| <= sqrt(1 - eps^2)

The sweep prints construction memory next to the bound at each accuracy; the
two columns agree to machine precision.  Near the ideal point the allowance
for an almost-ideal transfer shrinks like the square root of the constraint
tolerance.
"""

import numpy as np

from dmtransfer import (
    TransferSpec,
    bound_diag,
    bound_diagdiff,
    bound_offdiag,
    construct_diag_optimal,
    construct_diagdiff_optimal,
    construct_offdiag_optimal,
    erasure_budget,
    memory_diag_diff,
    memory_offdiag,
    transfer_residual,
)

accuracies = np.linspace(0.1, 1.0, 10)

print("diagonal-to-diagonal transfer of elements 1 and 2 (eps_1 = eps_2 = eps)")
print(f"{'eps':>6} {'memory':>12} {'bound':>12} {'residual':>10}")
for eps in accuracies:
    t = construct_diag_optimal(eps, eps)
    spec = TransferSpec.diagonal(((1, eps), (2, eps)))
    m = memory_offdiag(t, 1, 2)
    print(f"{eps:6.2f} {m:12.8f} {bound_diag(eps, eps, 'cross'):12.8f} "
          f"{transfer_residual(t, spec):10.1e}")

print("\noff-diagonal transfer r~_21 = eta lam_21")
print(f"{'|eta|':>6} {'memory':>12} {'bound':>12} {'residual':>10}")
for eta in accuracies:
    t = construct_offdiag_optimal(3, eta)
    spec = TransferSpec.offdiagonal(2, 1, eta)
    m = memory_offdiag(t, 1, 2)
    print(f"{eta:6.2f} {m:12.8f} {bound_offdiag(eta):12.8f} "
          f"{transfer_residual(t, spec):10.1e}")

print("\ndiagonal-difference memory under the same transfer")
print(f"{'eps':>6} {'memory':>12} {'bound':>12} {'residual':>10}")
for eps in accuracies:
    t = construct_diagdiff_optimal(eps)
    spec = TransferSpec.offdiagonal(1, 2, eps)
    m = memory_diag_diff(t, 1, 2)
    print(f"{eps:6.2f} {m:12.8f} {bound_diagdiff(eps):12.8f} "
          f"{transfer_residual(t, spec):10.1e}")

# A complex accuracy factor only enters through its modulus.
eta = 0.6 + 0.3j
t = construct_offdiag_optimal(3, eta)
print(f"\ncomplex accuracy eta = {eta}: memory {memory_offdiag(t, 1, 2):.8f}, "
      f"bound {bound_offdiag(abs(eta)):.8f}")

print("\nmemory allowance for an almost-ideal transfer (10 sqrt(tol)):")
for tol in (1e-6, 1e-8, 1e-10, 1e-12):
    print(f"  tol {tol:.0e} -> allowance {erasure_budget(tol):.1e}")
