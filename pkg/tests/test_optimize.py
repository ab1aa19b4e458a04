"""Tests for the constrained memory maximizer: the exact isometry
parametrization, analytic gradients against finite differences, the penalty
ascent, and table reproduction."""

import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dmtransfer.bounds import (
    TransferSpec,
    analytic_bound,
    construct_diag_optimal,
    construct_diagdiff_optimal,
    construct_offdiag_optimal,
    transfer_residual,
)
from dmtransfer.channel import isometry_residual
from dmtransfer.memory import memory_component, memory_diag_diff, memory_offdiag
from dmtransfer.optimize import (
    TABLE_CSV_HEADER,
    Objective,
    OptimizerConfig,
    OptimizerResult,
    TableRow,
    _grad_to_params,
    _isometry_from_params,
    _objective_value_grad,
    _params_shape,
    _penalty_value_grad,
    evaluate_objective,
    maximize_memory,
    params_from_tensor,
    parametrize_isometry,
    reproduce_tables,
    result_to_json,
    rows_to_csv,
)


# ---------------------------------------------------------------------------
# configuration / objective plumbing
# ---------------------------------------------------------------------------

def test_config_defaults():
    cfg = OptimizerConfig(n=3, dim_c=2)
    assert cfg.restarts == 10
    assert cfg.penalty_init == 10.0
    assert cfg.penalty_growth == 10.0
    assert cfg.constraint_tol == 1e-8


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n": 1, "dim_c": 1},
        {"n": 2, "dim_c": 0},
        {"n": 2, "dim_c": 1, "restarts": 0},
        {"n": 2, "dim_c": 1, "penalty_growth": 1.0},
        {"n": 2, "dim_c": 1, "constraint_tol": 1e-12},
        {"n": 2, "dim_c": 1, "seed": -1},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        OptimizerConfig(**kwargs)


def test_objective_validation():
    with pytest.raises(ValueError):
        Objective("norm")
    with pytest.raises(ValueError):
        Objective("offdiag", (2, 2))


def test_objective_resolve_defaults_to_spec_pair():
    spec = TransferSpec.offdiagonal(2, 1, 0.5)
    assert Objective("offdiag").resolve(spec, 3) == (1, 0)
    assert Objective("offdiag", (1, 3)).resolve(spec, 3) == (0, 2)
    with pytest.raises(ValueError):
        Objective("offdiag").resolve(TransferSpec.diagonal([(1, 0.5)]), 3)
    with pytest.raises(ValueError):
        Objective("offdiag", (1, 4)).resolve(spec, 3)


def test_evaluate_objective_matches_memory_functions():
    t = construct_offdiag_optimal(3, 0.6)
    spec = TransferSpec.offdiagonal(2, 1, 0.6)
    assert evaluate_objective(t, Objective("offdiag", (1, 2)), spec) == pytest.approx(0.8)
    assert evaluate_objective(t, Objective("offdiag_sq", (1, 2)), spec) == pytest.approx(0.64)
    assert evaluate_objective(t, Objective("diag_diff", (1, 2)), spec) == pytest.approx(
        memory_diag_diff(t, 1, 2)
    )
    assert evaluate_objective(t, Objective("component_re", (1, 2)), spec) == pytest.approx(
        memory_component(t, 1, 2, "real")
    )
    assert evaluate_objective(t, Objective("component_im", (1, 2)), spec) == pytest.approx(
        memory_component(t, 1, 2, "imag")
    )


# ---------------------------------------------------------------------------
# isometry parametrization
# ---------------------------------------------------------------------------

def test_parametrize_zero_params():
    t = parametrize_isometry(np.zeros(_params_shape(2, 1)[1]), 2, 1)
    # exp(0) = identity, so the slices are the first n identity columns
    m = 2 * 2 * 1
    expect = np.eye(m, dtype=complex)[:, :2].reshape(2, 2, 1, 2).transpose(3, 0, 1, 2)
    np.testing.assert_allclose(t.vectors, expect, atol=1e-15)
    assert isometry_residual(t) <= 1e-12


@pytest.mark.parametrize("n,dim_c", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 5), (4, 2)])
def test_parametrize_always_isometric(n, dim_c):
    rng = np.random.default_rng(n * 10 + dim_c)
    for _ in range(3):
        t = parametrize_isometry(rng.standard_normal((n * n * dim_c) ** 2), n, dim_c)
        assert isometry_residual(t) <= 1e-12
        assert t.n == n
        assert t.dim_c == dim_c


def test_parametrize_deterministic():
    x = np.random.default_rng(5).standard_normal(_params_shape(3, 2)[1])
    a = parametrize_isometry(x, 3, 2)
    b = parametrize_isometry(x, 3, 2)
    np.testing.assert_array_equal(a.vectors, b.vectors)


def test_parametrize_wrong_length():
    with pytest.raises(ValueError):
        parametrize_isometry(np.zeros(7), 2, 1)


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, 16, elements=st.floats(-10, 10)))
def test_parametrize_isometric_property(x):
    t = parametrize_isometry(x, 2, 1)
    assert isometry_residual(t) <= 1e-12


def test_params_from_tensor_round_trip():
    for t in (
        construct_diag_optimal(0.3, 0.8),
        construct_offdiag_optimal(3, 0.6 + 0.2j),
        construct_diagdiff_optimal(0.7),
    ):
        x = params_from_tensor(t)
        back = parametrize_isometry(x, t.n, t.dim_c)
        np.testing.assert_allclose(back.vectors, t.vectors, atol=1e-12)


def test_params_from_tensor_round_trip_random():
    rng = np.random.default_rng(33)
    t = parametrize_isometry(rng.standard_normal(_params_shape(3, 2)[1]), 3, 2)
    back = parametrize_isometry(params_from_tensor(t), 3, 2)
    np.testing.assert_allclose(back.vectors, t.vectors, atol=1e-12)


def test_params_from_tensor_requires_isometry():
    from dmtransfer.channel import StinespringTensor, identity_tensor

    v = identity_tensor(2).vectors * 0.7
    with pytest.raises(ValueError):
        params_from_tensor(StinespringTensor(v))


# ---------------------------------------------------------------------------
# analytic gradients vs central differences
# ---------------------------------------------------------------------------

def _fd_grad(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(len(x)):
        xp = x.copy()
        xp[i] += h
        xm = x.copy()
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2 * h)
    return g


def _objective_fun_grad(kind, n, dim_c, a, b):
    def fun(x):
        v, _ = _isometry_from_params(x, n, dim_c)
        return _objective_value_grad(v, kind, a, b)[0]

    def grad(x):
        v, spectral = _isometry_from_params(x, n, dim_c)
        g_v = _objective_value_grad(v, kind, a, b)[1]
        return _grad_to_params(g_v, spectral, n, dim_c)

    return fun, grad


@pytest.mark.parametrize("kind", ["offdiag", "offdiag_sq", "diag_diff",
                                  "component_re", "component_im"])
@pytest.mark.parametrize("n,dim_c", [(2, 1), (3, 2)])
def test_objective_gradients(kind, n, dim_c):
    rng = np.random.default_rng(hash((kind, n, dim_c)) % 2**32)
    fun, grad = _objective_fun_grad(kind, n, dim_c, 0, 1)
    for _ in range(2):
        x = rng.standard_normal(_params_shape(n, dim_c)[1])
        np.testing.assert_allclose(grad(x), _fd_grad(fun, x), atol=1e-6)


@pytest.mark.parametrize(
    "spec",
    [
        TransferSpec.diagonal([(1, 0.3), (2, 0.8)]),
        TransferSpec.offdiagonal(2, 1, 0.6 + 0.2j),
        TransferSpec.real_part(2, 1, 0.7),
        TransferSpec.imaginary_part(2, 1, 0.7),
        TransferSpec.diag_difference(1, 2, 0.7),
    ],
    ids=lambda s: s.kind,
)
def test_penalty_gradients(spec):
    n, dim_c = 3, 2

    def fun(x):
        v, _ = _isometry_from_params(x, n, dim_c)
        return _penalty_value_grad(v, spec)[0]

    def grad(x):
        v, spectral = _isometry_from_params(x, n, dim_c)
        g_v = _penalty_value_grad(v, spec)[1]
        return _grad_to_params(g_v, spectral, n, dim_c)

    rng = np.random.default_rng(99)
    for _ in range(2):
        x = rng.standard_normal(_params_shape(n, dim_c)[1])
        np.testing.assert_allclose(grad(x), _fd_grad(fun, x), atol=1e-6)


def test_penalty_value_is_squared_residual_scale():
    # the penalty is the sum of squared deviation magnitudes, so it vanishes
    # exactly on a constraint-satisfying channel
    t = construct_offdiag_optimal(3, 0.6)
    spec = TransferSpec.offdiagonal(2, 1, 0.6)
    val, _, worst = _penalty_value_grad(t.vectors, spec)
    assert val <= 1e-28
    assert worst <= 1e-14
    assert worst == pytest.approx(transfer_residual(t, spec), abs=1e-15)


# ---------------------------------------------------------------------------
# maximize_memory
# ---------------------------------------------------------------------------

def test_small_maximization_reaches_bound():
    spec = TransferSpec.offdiagonal(2, 1, 0.6)
    cfg = OptimizerConfig(n=2, dim_c=1, restarts=3, max_iters=300, seed=1)
    res = maximize_memory(spec, Objective("offdiag_sq"), cfg)
    assert res.feasible
    assert res.residual <= cfg.constraint_tol
    assert 0.62 <= res.best_value <= 0.64 + 1e-4
    assert isometry_residual(res.tensor) <= 1e-12
    assert len(res.trace) == 3
    assert res.iterations_used > 0


def test_result_value_matches_tensor():
    spec = TransferSpec.offdiagonal(2, 1, 0.6)
    cfg = OptimizerConfig(n=2, dim_c=1, restarts=2, max_iters=200, seed=2)
    obj = Objective("offdiag_sq")
    res = maximize_memory(spec, obj, cfg)
    assert evaluate_objective(res.tensor, obj, spec) == pytest.approx(
        res.best_value, abs=1e-12
    )
    assert transfer_residual(res.tensor, spec) == pytest.approx(res.residual, abs=1e-14)


def test_maximization_is_deterministic():
    spec = TransferSpec.offdiagonal(2, 1, 0.6)
    cfg = OptimizerConfig(n=2, dim_c=1, restarts=2, max_iters=200, seed=7)
    a = maximize_memory(spec, Objective("offdiag_sq"), cfg)
    b = maximize_memory(spec, Objective("offdiag_sq"), cfg)
    assert a.best_value == b.best_value
    assert a.residual == b.residual
    assert a.trace == b.trace
    np.testing.assert_array_equal(a.tensor.vectors, b.tensor.vectors)


def test_different_seeds_usually_differ():
    spec = TransferSpec.offdiagonal(2, 1, 0.6)
    cfg1 = OptimizerConfig(n=2, dim_c=1, restarts=1, max_iters=40, seed=1)
    cfg2 = OptimizerConfig(n=2, dim_c=1, restarts=1, max_iters=40, seed=2)
    a = maximize_memory(spec, Objective("offdiag_sq"), cfg1)
    b = maximize_memory(spec, Objective("offdiag_sq"), cfg2)
    assert not np.array_equal(a.tensor.vectors, b.tensor.vectors)


def test_warm_start_at_analytic_optimum_is_exact():
    spec = TransferSpec.offdiagonal(2, 1, 0.6)
    x0 = params_from_tensor(construct_offdiag_optimal(2, 0.6))
    cfg = OptimizerConfig(n=2, dim_c=1, restarts=1, max_iters=300, seed=3)
    res = maximize_memory(spec, Objective("offdiag_sq"), cfg, init_params=x0)
    assert abs(res.best_value - 0.64) <= 1e-10
    res2 = maximize_memory(spec, Objective("offdiag"), cfg, init_params=x0)
    assert abs(res2.best_value - 0.8) <= 1e-10


def test_warm_start_diag_diff():
    spec = TransferSpec.offdiagonal(1, 2, 0.8)
    x0 = params_from_tensor(construct_diagdiff_optimal(0.8))
    cfg = OptimizerConfig(n=3, dim_c=1, restarts=1, max_iters=300, seed=4)
    res = maximize_memory(spec, Objective("diag_diff", (1, 2)), cfg, init_params=x0)
    assert abs(res.best_value - 0.6) <= 1e-10


def test_init_params_shape_check():
    spec = TransferSpec.offdiagonal(2, 1, 0.6)
    cfg = OptimizerConfig(n=2, dim_c=1, restarts=1, max_iters=50, seed=5)
    with pytest.raises(ValueError):
        maximize_memory(spec, Objective("offdiag"), cfg, init_params=np.zeros(3))


def test_infeasible_budget_is_reported_not_silent(caplog):
    # at an ideal accuracy some constraint deviations vanish only
    # quadratically, which keeps the reachable residual above 1e-10
    spec = TransferSpec.offdiagonal(2, 1, 1.0)
    cfg = OptimizerConfig(n=3, dim_c=1, restarts=1, max_iters=50, seed=0,
                          constraint_tol=1e-10)
    with caplog.at_level(logging.WARNING, logger="dmtransfer.optimize"):
        res = maximize_memory(spec, Objective("offdiag_sq"), cfg)
    assert not res.feasible
    assert res.residual > cfg.constraint_tol
    assert any("no feasible point" in r.message for r in caplog.records)


def test_spec_must_fit_dimension():
    spec = TransferSpec.offdiagonal(2, 4, 0.5)
    cfg = OptimizerConfig(n=3, dim_c=1, restarts=1, max_iters=50)
    with pytest.raises(ValueError):
        maximize_memory(spec, Objective("offdiag"), cfg)


@pytest.mark.parametrize(
    "spec,objective,bound_pair",
    [
        (TransferSpec.offdiagonal(2, 1, 0.5), Objective("offdiag"), (1, 2)),
        (TransferSpec.offdiagonal(2, 1, 0.5), Objective("diag_diff", (1, 2)), (1, 2)),
        (TransferSpec.diagonal([(1, 0.4), (2, 0.7)]), Objective("offdiag", (1, 2)), (1, 2)),
    ],
    ids=["offdiag", "diagdiff", "diagonal"],
)
def test_feasible_optima_respect_bounds(spec, objective, bound_pair):
    cfg = OptimizerConfig(n=3, dim_c=1, restarts=2, max_iters=200, seed=11)
    res = maximize_memory(spec, objective, cfg)
    if res.feasible:
        bound = analytic_bound(spec, objective.kind, bound_pair)
        assert res.best_value <= bound + 1e-4


def test_ideal_diagonal_transfer_kills_offdiag_memory():
    spec = TransferSpec.diagonal([(1, 1.0)])
    cfg = OptimizerConfig(n=3, dim_c=1, restarts=2, max_iters=300, seed=13)
    res = maximize_memory(spec, Objective("offdiag", (1, 2)), cfg)
    assert res.feasible
    assert res.best_value <= 1e-3


def test_result_serializes_to_json():
    res = OptimizerResult(0.5, construct_offdiag_optimal(2, 0.8), 1e-12,
                          (0.5, 0.4), 42, True)
    import json

    doc = json.loads(result_to_json(res, extra={"bound": 0.36}))
    assert doc["best_value"] == 0.5
    assert doc["feasible"] is True
    assert doc["bound"] == 0.36
    assert doc["trace"] == [0.5, 0.4]


# ---------------------------------------------------------------------------
# table reproduction
# ---------------------------------------------------------------------------

def test_reproduce_tables_quick_cell():
    rows = reproduce_tables(restarts=2, max_iters=150, seed=5,
                            dim_c_values=(2,), eps_values=(0.8,))
    assert len(rows) == 1
    row = rows[0]
    assert row.dim_c == 2
    assert row.epsilon == 0.8
    assert row.bound == pytest.approx(0.36)
    assert row.restarts == 2
    assert row.residual <= 1e-8
    assert 0.3 <= row.best_theta_sq <= 0.36 + 1e-4


def test_reproduce_tables_deterministic():
    kwargs = dict(restarts=1, max_iters=60, seed=9, dim_c_values=(2,), eps_values=(0.3,))
    a = reproduce_tables(**kwargs)
    b = reproduce_tables(**kwargs)
    assert a[0].best_theta_sq == b[0].best_theta_sq
    assert a[0].residual == b[0].residual


def test_rows_to_csv_format():
    rows = [TableRow(2, 0.3, 0.90601, 0.91, 1.5e-9, 20)]
    text = rows_to_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == TABLE_CSV_HEADER
    assert lines[0] == "dim_c,epsilon,best_theta_sq,bound,residual,restarts"
    fields = lines[1].split(",")
    assert fields[0] == "2"
    assert fields[1] == "0.3"
    # floats round-trip exactly through repr
    assert float(fields[2]) == 0.90601
    assert float(fields[4]) == 1.5e-9
    assert fields[5] == "20"


def test_csv_values_round_trip_bit_exact():
    value = 0.9060123456789012
    rows = [TableRow(3, 0.3, value, 0.91, 3.2e-10, 5)]
    text = rows_to_csv(rows)
    parsed = float(text.strip().split("\n")[1].split(",")[2])
    assert parsed == value
