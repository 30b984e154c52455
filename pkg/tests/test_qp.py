import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize

from handling_mpc.qp import kkt_residual, qp_cost, solve_qp

from oracles import (grid_min_box_qp, grid_min_box_qp_full, random_box_instance,
                     random_spd)


def test_row_scan_oracle_equals_full_grid():
    rng = np.random.default_rng(11)
    for _ in range(5):
        H, f, lb, ub = random_box_instance(rng)
        best, _ = grid_min_box_qp(H, f, lb, ub, n=801)
        assert best == pytest.approx(grid_min_box_qp_full(H, f, lb, ub, n=801), abs=1e-12)


def test_unconstrained_closed_form():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 7))
        H, f = random_spd(rng, n), rng.standard_normal(n)
        sol = solve_qp(H, f)
        assert np.max(np.abs(sol.u + np.linalg.solve(H, f))) <= 1e-8
        assert not sol.degraded


def test_all_bounds_active():
    H = np.eye(3) * 2.0
    sol = solve_qp(H, np.full(3, 100.0), lb=np.full(3, -1.5), ub=np.full(3, 4.0))
    assert np.array_equal(sol.u, np.full(3, -1.5))


def test_grid_oracle_small_sample():
    rng = np.random.default_rng(5)
    for _ in range(25):
        H, f, lb, ub = random_box_instance(rng)
        sol = solve_qp(H, f, lb, ub)
        best, cell = grid_min_box_qp(H, f, lb, ub)
        c = qp_cost(H, f, sol.u)
        assert c <= best + 1e-12
        assert best - c <= cell
        assert np.all(sol.u >= lb) and np.all(sol.u <= ub)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_kkt_and_determinism(seed, n):
    rng = np.random.default_rng(seed)
    H, f, lb, ub = random_box_instance(rng, n)
    a = solve_qp(H, f, lb, ub)
    b = solve_qp(H, f, lb, ub)
    assert a.kkt_residual <= 1e-8 and kkt_residual(H, f, lb, ub, a.u) <= 1e-8
    assert a.u.tobytes() == b.u.tobytes()


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_warm_start_reaches_same_minimizer(seed, n):
    rng = np.random.default_rng(seed)
    H, f, lb, ub = random_box_instance(rng, n)
    cold = solve_qp(H, f, lb, ub)
    warm = solve_qp(H, f, lb, ub, u0=rng.uniform(lb, ub))
    assert warm.u == pytest.approx(cold.u, abs=1e-9)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.sampled_from([1.0, 100.0, 1e4]))
def test_penalized_rows_match_general_minimizer(seed, n, rho):
    rng = np.random.default_rng(seed)
    H, f, lb, ub = random_box_instance(rng, n)
    G = rng.standard_normal((2 * n, n))
    h = rng.uniform(-0.5, 0.5, 2 * n)
    sol = solve_qp(H, f, lb, ub, G, h, rho)
    assert not sol.degraded
    ref = minimize(lambda u: qp_cost(H, f, u, 0.0, G, h, rho), np.zeros(n),
                   jac=lambda u: H @ u + f + 2 * rho * G.T @ np.maximum(G @ u - h, 0.0),
                   bounds=list(zip(lb, ub)), method="L-BFGS-B",
                   options=dict(ftol=1e-15, gtol=1e-12, maxiter=5000))
    assert qp_cost(H, f, sol.u, 0.0, G, h, rho) <= ref.fun + 1e-7 * max(1.0, abs(ref.fun))


def test_iteration_cap_sets_degraded():
    rng = np.random.default_rng(2)
    H, f, lb, ub = random_box_instance(rng, 6)
    f = f + 50.0
    sol = solve_qp(H, f, lb, ub, max_iter=1)
    full = solve_qp(H, f, lb, ub)
    assert sol.degraded and not full.degraded
    assert np.all(sol.u >= lb) and np.all(sol.u <= ub)


@pytest.mark.parametrize("H,f,lb,ub", [
    (np.array([[1.0, 0.0], [0.0, -1.0]]), np.zeros(2), None, None),
    (np.eye(2), np.zeros(3), None, None),
    (np.eye(2), np.zeros(2), np.array([1.0, 0.0]), np.array([0.0, 1.0])),
    (np.eye(2), np.array([np.nan, 0.0]), None, None),
])
def test_invalid_problems_rejected(H, f, lb, ub):
    with pytest.raises(ValueError):
        solve_qp(H, f, lb, ub)
