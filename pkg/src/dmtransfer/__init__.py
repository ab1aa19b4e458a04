"""Transfer of density-matrix elements between systems: channels, memory,
accuracy bounds, and constrained memory maximization."""

from .linalg import (
    check_density_matrix,
    fidelity,
    frobenius_norm,
    is_density_matrix,
    random_density_matrix,
    random_unitary,
)
from .channel import (
    StinespringTensor,
    apply_output_unitary,
    gram_matrix,
    identity_tensor,
    isometry_residual,
    load_tensor,
    output_state_a,
    output_state_b,
    save_tensor,
    swap_tensor,
    tensor_from_dict,
    tensor_from_json,
    tensor_to_dict,
    tensor_to_json,
    theta,
)
from .memory import (
    MemoryReport,
    full_report,
    memory_component,
    memory_diag_diff,
    memory_fd_oracle,
    memory_offdiag,
)
from .bounds import (
    TheoremCheck,
    TheoremReport,
    TransferSpec,
    analytic_bound,
    bound_diag,
    bound_diagdiff,
    bound_offdiag,
    construct_diag_optimal,
    construct_diagdiff_optimal,
    construct_offdiag_optimal,
    erasure_budget,
    transfer_residual,
    verify_ideal_theorems,
)
from .optimize import (
    Objective,
    OptimizerConfig,
    OptimizerResult,
    TableRow,
    evaluate_objective,
    maximize_memory,
    params_from_tensor,
    parametrize_isometry,
    reproduce_tables,
    rows_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "StinespringTensor",
    "MemoryReport",
    "TransferSpec",
    "TheoremCheck",
    "TheoremReport",
    "Objective",
    "OptimizerConfig",
    "OptimizerResult",
    "TableRow",
    "analytic_bound",
    "apply_output_unitary",
    "bound_diag",
    "bound_diagdiff",
    "bound_offdiag",
    "check_density_matrix",
    "construct_diag_optimal",
    "construct_diagdiff_optimal",
    "construct_offdiag_optimal",
    "erasure_budget",
    "evaluate_objective",
    "fidelity",
    "frobenius_norm",
    "full_report",
    "gram_matrix",
    "identity_tensor",
    "is_density_matrix",
    "isometry_residual",
    "load_tensor",
    "maximize_memory",
    "memory_component",
    "memory_diag_diff",
    "memory_fd_oracle",
    "memory_offdiag",
    "output_state_a",
    "output_state_b",
    "params_from_tensor",
    "parametrize_isometry",
    "random_density_matrix",
    "random_unitary",
    "reproduce_tables",
    "rows_to_csv",
    "save_tensor",
    "swap_tensor",
    "tensor_from_dict",
    "tensor_from_json",
    "tensor_to_dict",
    "tensor_to_json",
    "theta",
    "transfer_residual",
    "verify_ideal_theorems",
]
