"""Command-line interface: verify, bounds, optimize, tables.

Every command reads an optional JSON config (--config).  Unknown config
fields are rejected.  Exit codes: 0 success, 1 a check or feasibility
failure, 2 bad usage or config.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bounds import (
    TheoremCheck,
    TransferSpec,
    analytic_bound,
    bound_diag,
    bound_diagdiff,
    bound_offdiag,
    construct_diag_optimal,
    construct_diagdiff_optimal,
    construct_offdiag_optimal,
    transfer_residual,
    verify_ideal_theorems,
)
from .channel import (
    apply_output_unitary,
    isometry_residual,
    load_tensor,
    output_state_a,
    output_state_b,
    save_tensor,
    theta,
)
from .linalg import random_density_matrix, random_unitary
from .memory import memory_diag_diff, memory_fd_oracle, memory_offdiag
from .optimize import (
    Objective,
    OptimizerConfig,
    maximize_memory,
    parametrize_isometry,
    reproduce_tables,
    rows_to_csv,
)


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# Config plumbing
# ---------------------------------------------------------------------------

def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _check_keys(doc: dict, allowed: set[str], context: str) -> None:
    extra = set(doc) - allowed
    if extra:
        raise ConfigError(f"unknown {context} fields: {sorted(extra)}")


def _transfer_from_config(doc: dict) -> TransferSpec:
    try:
        return TransferSpec.from_dict(doc)
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        raise ConfigError(f"bad transfer spec: {exc}") from exc


def _optimizer_config(doc: dict, n: int, dim_c: int, args) -> OptimizerConfig:
    _check_keys(
        doc,
        {"restarts", "max_iters", "seed", "penalty_init", "penalty_growth",
         "constraint_tol", "step_tol"},
        "optimizer",
    )
    fields = dict(doc)
    if args.seed is not None:
        fields["seed"] = args.seed
    if args.quick:
        fields["restarts"] = min(int(fields.get("restarts", 10)), 3)
        fields["max_iters"] = min(int(fields.get("max_iters", 300)), 150)
    try:
        return OptimizerConfig(n=n, dim_c=dim_c, **fields)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad optimizer config: {exc}") from exc


def _emit_checks(checks: list[TheoremCheck], as_json: bool) -> int:
    passed = all(c.passed for c in checks)
    if as_json:
        print(json.dumps(
            {"passed": passed, "checks": [c.to_dict() for c in checks]}, indent=2
        ))
    else:
        for c in checks:
            tag = "PASS" if c.passed else "FAIL"
            print(f"[{tag}] {c.description}: measured {c.measured:.3e}"
                  f" (threshold {c.threshold:.3e})")
        print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _theorem_suite() -> list[TheoremCheck]:
    checks: list[TheoremCheck] = []
    cases = [
        (construct_diag_optimal(1.0, 1.0), TransferSpec.diagonal([(1, 1.0), (2, 1.0)])),
        (construct_offdiag_optimal(2, 1.0), TransferSpec.offdiagonal(2, 1, 1.0)),
        (construct_offdiag_optimal(2, 1.0), TransferSpec.real_part(2, 1, 1.0)),
        (construct_offdiag_optimal(2, 1.0), TransferSpec.imaginary_part(2, 1, 1.0)),
        (construct_diagdiff_optimal(1.0), TransferSpec.diag_difference(1, 2, 1.0)),
    ]
    for tensor, spec in cases:
        checks.extend(verify_ideal_theorems(tensor, spec).checks)
    return checks


def _saturation_suite() -> list[TheoremCheck]:
    tol = 1e-12
    checks = []
    t = construct_diag_optimal(0.3, 0.8)
    spec = TransferSpec.diagonal([(1, 0.3), (2, 0.8)])
    checks.append(TheoremCheck(
        "diagonal construction satisfies its transfer spec",
        transfer_residual(t, spec), 1e-14))
    for pair, kind in (((1, 2), "cross"), ((1, 3), "outside-a"), ((2, 3), "outside-b")):
        checks.append(TheoremCheck(
            f"diagonal construction saturates the {kind} bound on {pair}",
            abs(memory_offdiag(t, *pair) - bound_diag(0.3, 0.8, kind)), tol))
    t = construct_offdiag_optimal(2, 0.6)
    checks.append(TheoremCheck(
        "off-diagonal construction satisfies its transfer spec",
        transfer_residual(t, TransferSpec.offdiagonal(2, 1, 0.6)), 1e-14))
    checks.append(TheoremCheck(
        "off-diagonal construction saturates sqrt(1 - |eta|^2)",
        abs(memory_offdiag(t, 1, 2) - bound_offdiag(0.6)), tol))
    t = construct_diagdiff_optimal(0.6)
    checks.append(TheoremCheck(
        "difference construction satisfies its transfer spec",
        transfer_residual(t, TransferSpec.offdiagonal(1, 2, 0.6)), 1e-14))
    checks.append(TheoremCheck(
        "difference construction saturates sqrt(1 - eps^2)",
        abs(memory_diag_diff(t, 1, 2) - bound_diagdiff(0.6)), tol))
    checks.append(TheoremCheck(
        "difference construction keeps no pair memory",
        memory_offdiag(t, 1, 2), tol))
    return checks


def _invariant_suite(samples: int, seed: int) -> list[TheoremCheck]:
    shapes = [(2, 1), (3, 1), (2, 2), (3, 2), (4, 1), (2, 3), (3, 3)]
    rng_seeds = np.random.SeedSequence(seed).spawn(samples)
    worst = {
        "trace": 0.0, "psd": 0.0, "pairing": 0.0, "theta_trace": 0.0,
        "cap": 0.0, "oracle": 0.0, "unitary": 0.0,
    }
    for i, ss in enumerate(rng_seeds):
        n, dim_c = shapes[i % len(shapes)]
        rng = np.random.default_rng(ss)
        t = parametrize_isometry(rng.standard_normal((n * n * dim_c) ** 2), n, dim_c)
        lam = random_density_matrix(n, int(ss.generate_state(1)[0]))
        out_a = output_state_a(t, lam)
        out_b = output_state_b(t, lam)
        worst["trace"] = max(worst["trace"],
                             abs(np.trace(out_a) - 1.0), abs(np.trace(out_b) - 1.0))
        for out in (out_a, out_b):
            w = np.linalg.eigvalsh(0.5 * (out + out.conj().T))
            worst["psd"] = max(worst["psd"], max(0.0, -float(w[0])))
        for p in range(1, n + 1):
            for r in range(1, n + 1):
                th = theta(t, p, r)
                worst["pairing"] = max(worst["pairing"], float(np.max(np.abs(
                    th - theta(t, r, p).conj().T))))
                worst["theta_trace"] = max(worst["theta_trace"],
                                           abs(np.trace(th) - (1.0 if p == r else 0.0)))
        mem = memory_offdiag(t, 1, 2)
        worst["cap"] = max(worst["cap"], mem - 1.0)
        worst["oracle"] = max(worst["oracle"], abs(mem - memory_fd_oracle(t, 1, 2)))
        u = random_unitary(n, int(ss.generate_state(2)[1]))
        worst["unitary"] = max(worst["unitary"],
                               abs(mem - memory_offdiag(apply_output_unitary(t, u), 1, 2)))
    thresholds = {
        "trace": ("output states keep unit trace", 1e-10),
        "psd": ("output states stay positive semidefinite", 1e-9),
        "pairing": ("memory operators satisfy Theta_pr = Theta_rp^dag", 1e-10),
        "theta_trace": ("memory operators satisfy tr Theta_pr = delta_pr", 1e-10),
        "cap": ("memories never exceed 1", 1e-9),
        "oracle": ("finite-difference oracle matches the closed form", 1e-8),
        "unitary": ("memory is invariant under output unitaries on A", 1e-10),
    }
    return [
        TheoremCheck(f"{desc} ({samples} random channels)", worst[key], thr)
        for key, (desc, thr) in thresholds.items()
    ]


def cmd_verify(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, {"seed", "samples", "tolerance", "tensor", "transfer"}, "verify")
    tolerance = float(doc.get("tolerance", 1e-12))
    if "tensor" in doc:
        if "transfer" not in doc:
            raise ConfigError("verifying a tensor file requires a transfer spec")
        try:
            tensor = load_tensor(doc["tensor"])
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read tensor {doc['tensor']}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"bad tensor file: {exc}") from exc
        spec = _transfer_from_config(doc["transfer"])
        checks = [TheoremCheck(
            "tensor is isometric", isometry_residual(tensor), 1e-8)]
        try:
            checks.extend(verify_ideal_theorems(tensor, spec, tolerance).checks)
        except ValueError as exc:
            checks.append(TheoremCheck(f"ideal transfer precondition ({exc})",
                                       float("inf"), tolerance))
        return _emit_checks(checks, args.json)
    samples = int(doc.get("samples", 100))
    if args.quick:
        samples = min(samples, 20)
    seed = args.seed if args.seed is not None else int(doc.get("seed", 0))
    checks = _theorem_suite() + _saturation_suite() + _invariant_suite(samples, seed)
    return _emit_checks(checks, args.json)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def cmd_bounds(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, {"transfer"}, "bounds")
    if "transfer" in doc:
        spec = _transfer_from_config(doc["transfer"])
    else:
        spec = TransferSpec.offdiagonal(2, 1, 0.3)
    lines = []
    payload: dict = {"kind": spec.kind, "bounds": []}
    if spec.kind == "diagonal":
        elems = list(zip(spec.indices, spec.accuracy))
        desc = ", ".join(f"eps_{u}={e}" for u, e in elems)
        lines.append(f"diagonal transfer ({desc})")
        for i, (u, eu) in enumerate(elems):
            for svdx, ev in elems[i + 1:]:
                val = bound_diag(eu, ev, "cross")
                lines.append(f"  pair ({u}, {svdx}) cross bound: {val:.5f}")
                payload["bounds"].append({"pair": [u, svdx], "value": val})
            val = bound_diag(eu, eu, "outside-a")
            lines.append(f"  pairs ({u}, untouched) outside bound: {val:.5f}")
            payload["bounds"].append({"pair": [u, None], "value": val})
    elif spec.kind == "offdiagonal":
        for (a, b), eta in zip(spec.indices, spec.accuracy):
            mod = abs(eta)
            val = bound_offdiag(mod)
            lines.append(f"off-diagonal transfer ({a}, {b}) with |eta|={mod:g}")
            lines.append(f"  pair memory bound: {val:.5f} (squared {val**2:.5f})")
            lines.append(f"  difference memory bound: {bound_diagdiff(mod):.5f}")
            payload["bounds"].append(
                {"pair": [a, b], "value": val, "squared": val**2,
                 "diag_diff": bound_diagdiff(mod)})
    else:
        for (a, b), eta in zip(spec.indices, spec.accuracy):
            lines.append(f"{spec.kind} transfer ({a}, {b}) with eta={eta:g}")
            lines.append("  no sharper bound than the universal cap: 1.00000")
            payload["bounds"].append({"pair": [a, b], "value": 1.0})
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------

_DEFAULT_OBJECTIVES = {
    "offdiagonal": "offdiag",
    "diag-difference": "diag_diff",
    "real-part": "component_re",
    "imaginary-part": "component_im",
}


def _objective_from_config(doc: dict, spec: TransferSpec) -> Objective:
    if doc:
        _check_keys(doc, {"kind", "indices"}, "objective")
        if "kind" not in doc:
            raise ConfigError("objective needs a kind")
        indices = tuple(doc["indices"]) if "indices" in doc else None
        try:
            return Objective(doc["kind"], indices)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad objective: {exc}") from exc
    if spec.kind == "diagonal":
        raise ConfigError("diagonal specs need an explicit objective with indices")
    return Objective(_DEFAULT_OBJECTIVES[spec.kind])


def cmd_optimize(args) -> int:
    doc = _load_config(args.config)
    if not doc:
        raise ConfigError("optimize requires --config with n, dim_c, and transfer")
    _check_keys(doc, {"n", "dim_c", "transfer", "objective", "optimizer", "output"},
                "optimize")
    for key in ("n", "dim_c", "transfer"):
        if key not in doc:
            raise ConfigError(f"missing config field: {key}")
    n, dim_c = int(doc["n"]), int(doc["dim_c"])
    spec = _transfer_from_config(doc["transfer"])
    objective = _objective_from_config(doc.get("objective", {}), spec)
    config = _optimizer_config(doc.get("optimizer", {}), n, dim_c, args)
    out = doc.get("output", {})
    _check_keys(out, {"path", "format", "tensor_path"}, "output")
    try:
        spec.validate_for_dimension(n)
        a0, b0 = objective.resolve(spec, n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = maximize_memory(spec, objective, config)
    bound = analytic_bound(spec, objective.kind, (a0 + 1, b0 + 1))
    doc_out = result.to_dict()
    doc_out.update({
        "objective": objective.kind,
        "objective_pair": [a0 + 1, b0 + 1],
        "bound": bound,
        "transfer": spec.to_dict(),
    })
    path = args.out or out.get("path")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc_out, fh, indent=2)
    if out.get("tensor_path"):
        save_tensor(result.tensor, out["tensor_path"])
    if args.json:
        print(json.dumps(doc_out, indent=2))
    else:
        print(f"best {objective.kind} on pair ({a0 + 1}, {b0 + 1}): "
              f"{result.best_value:.6f} (bound {bound:.6f})")
        print(f"constraint residual: {result.residual:.3e}"
              f"  feasible: {result.feasible}")
        print(f"iterations: {result.iterations_used} over {config.restarts} restarts")
    return 0 if result.feasible else 1


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def cmd_tables(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, {"optimizer", "output"}, "tables")
    opt = dict(doc.get("optimizer", {}))
    _check_keys(opt, {"restarts", "max_iters", "seed", "constraint_tol"},
                "tables optimizer")
    restarts = int(opt.get("restarts", 20))
    max_iters = int(opt.get("max_iters", 500))
    seed = args.seed if args.seed is not None else int(opt.get("seed", 20260823))
    constraint_tol = float(opt.get("constraint_tol", 1e-8))
    if args.quick:
        restarts = min(restarts, 3)
        max_iters = min(max_iters, 150)
    out = doc.get("output", {})
    _check_keys(out, {"path", "format"}, "output")
    rows = reproduce_tables(
        restarts=restarts, max_iters=max_iters, seed=seed,
        constraint_tol=constraint_tol,
    )
    csv_text = rows_to_csv(rows)
    path = args.out or out.get("path")
    if path:
        fmt = out.get("format", "csv")
        if fmt == "csv":
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        elif fmt == "json":
            with open(path, "w", encoding="utf-8") as fh:
                json.dump([r.to_dict() for r in rows], fh, indent=2)
        else:
            raise ConfigError(f"unknown output format {fmt!r}")
    if args.json:
        print(json.dumps(
            {"quick": bool(args.quick), "rows": [r.to_dict() for r in rows]},
            indent=2))
    else:
        print(csv_text, end="")
        if args.quick:
            print("# quick mode: reduced restarts, looser values", file=sys.stderr)
    ok = all(r.residual <= constraint_tol for r in rows)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmtransfer",
        description="Memory and accuracy bounds of matrix-element transfer channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--quick", action="store_true",
                        help="smaller budgets, looser values")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="override the random seed")
    common.add_argument("--out", metavar="PATH", help="write results to a file")
    sub.add_parser("verify", parents=[common],
                   help="check erasure theorems, saturation, and channel invariants")
    sub.add_parser("bounds", parents=[common],
                   help="print accuracy-memory bounds for a transfer spec")
    sub.add_parser("optimize", parents=[common],
                   help="maximize a memory objective under transfer constraints")
    sub.add_parser("tables", parents=[common],
                   help="tabulate maximal squared memory against the bound")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.seed is not None and not (0 <= args.seed < 2**64):
        print("error: --seed must fit in an unsigned 64-bit integer", file=sys.stderr)
        return 2
    handlers = {
        "verify": cmd_verify,
        "bounds": cmd_bounds,
        "optimize": cmd_optimize,
        "tables": cmd_tables,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
