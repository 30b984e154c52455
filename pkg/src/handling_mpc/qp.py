"""Small dense box-constrained QP solver.

Minimizes ``0.5 u'Hu + f'u + rho * sum(max(0, G u - h)**2)`` subject to
``lb <= u <= ub``. The inner problem (no penalty rows) is solved with a primal
active-set method; penalty rows are handled by an outer loop that freezes the
set of violated rows, solves the resulting box QP, and line-searches on the
true piecewise-quadratic objective until the violated set stops changing.
Everything is deterministic for a fixed input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ITER = 1000


@dataclass
class QpSolution:
    u: np.ndarray
    iterations: int
    degraded: bool
    kkt_residual: float


def kkt_residual(H: np.ndarray, f: np.ndarray, lb: np.ndarray, ub: np.ndarray,
                 u: np.ndarray) -> float:
    """Projected-gradient residual, scaled by the largest Hessian entry."""
    scale = max(float(np.max(np.abs(H))), 1e-300)
    g = (H @ u + f) / scale
    return float(np.max(np.abs(u - np.clip(u - g, lb, ub)), initial=0.0))


def _check_problem(H, f, lb, ub):
    H = np.asarray(H, dtype=float)
    f = np.asarray(f, dtype=float)
    n = f.size
    lb = np.full(n, -np.inf) if lb is None else np.asarray(lb, dtype=float)
    ub = np.full(n, np.inf) if ub is None else np.asarray(ub, dtype=float)
    if H.shape != (n, n) or lb.shape != (n,) or ub.shape != (n,):
        raise ValueError("inconsistent QP dimensions")
    if np.any(lb > ub):
        raise ValueError("QP bounds require lb <= ub")
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(f))):
        raise ValueError("QP data must be finite")
    try:
        np.linalg.cholesky(0.5 * (H + H.T))
    except np.linalg.LinAlgError:
        raise ValueError("QP Hessian is not positive definite") from None
    return H, f, lb, ub


def _box_active_set(H, f, lb, ub, u0, max_iter):
    n = f.size
    scale = max(float(np.max(np.abs(H))), 1e-300)
    Hs, fs = H / scale, f / scale
    u = np.clip(np.zeros(n) if u0 is None else np.asarray(u0, dtype=float), lb, ub)
    # -1 at lower bound, +1 at upper bound, 0 free
    W = np.zeros(n, dtype=int)
    W[u <= lb] = -1
    W[(u >= ub) & (W == 0)] = 1
    u[W == -1] = lb[W == -1]
    u[W == 1] = ub[W == 1]
    step_tol = 1e-14 * (1.0 + float(np.max(np.abs(u), initial=0.0)))
    for it in range(1, max_iter + 1):
        free = W == 0
        target = u.copy()
        if free.any():
            fixed = ~free
            rhs = -(fs[free] + Hs[np.ix_(free, fixed)] @ u[fixed])
            target[free] = np.linalg.solve(Hs[np.ix_(free, free)], rhs)
        p = target - u
        if np.max(np.abs(p), initial=0.0) <= step_tol:
            u = target
            g = Hs @ u + fs
            mult = np.where(W == -1, g, np.where(W == 1, -g, np.inf))
            j = int(np.argmin(mult))
            if mult[j] >= -1e-13:
                return u, it, False
            W[j] = 0
            continue
        alpha, block, side = 1.0, -1, 0
        for i in np.flatnonzero(free):
            if p[i] < 0 and np.isfinite(lb[i]):
                a = (lb[i] - u[i]) / p[i]
                if a < alpha:
                    alpha, block, side = a, i, -1
            elif p[i] > 0 and np.isfinite(ub[i]):
                a = (ub[i] - u[i]) / p[i]
                if a < alpha:
                    alpha, block, side = a, i, 1
        u = u + max(alpha, 0.0) * p
        if block >= 0:
            u[block] = lb[block] if side < 0 else ub[block]
            W[block] = side
    return u, max_iter, True


def _penalized_objective(H, f, G, h, rho, u):
    viol = np.maximum(G @ u - h, 0.0)
    return 0.5 * u @ H @ u + f @ u + rho * viol @ viol


def _frozen_model(H, f, G, h, rho, active):
    Ga, ha = G[active], h[active]
    return H + 2.0 * rho * Ga.T @ Ga, f - 2.0 * rho * Ga.T @ ha


def _line_search(H, f, G, h, rho, u, d):
    """Exact minimizer over t in [0, 1] of the convex piecewise quadratic."""
    Gd = G @ d
    slack = h - G @ u
    with np.errstate(divide="ignore", invalid="ignore"):
        t_break = np.where(Gd != 0, slack / Gd, np.nan)
    knots = np.unique(np.concatenate(([0.0, 1.0], t_break[(t_break > 0) & (t_break < 1)])))
    for a, b in zip(knots[:-1], knots[1:]):
        mid = 0.5 * (a + b)
        active = (G @ (u + mid * d) - h) > 0
        Hm, fm = _frozen_model(H, f, G, h, rho, active)
        curv = d @ Hm @ d
        slope0 = d @ (Hm @ u + fm)
        t_star = -slope0 / curv if curv > 0 else b
        if t_star < b:
            return max(t_star, a)
    return 1.0


def solve_qp(H, f, lb=None, ub=None, G=None, h=None, rho: float = 0.0,
             u0=None, max_iter: int = MAX_ITER) -> QpSolution:
    """Solve the box QP, optionally with quadratically penalized rows ``G u <= h``."""
    H, f, lb, ub = _check_problem(H, f, lb, ub)
    n = f.size
    if G is None or rho <= 0 or len(G) == 0:
        u, iters, degraded = _box_active_set(H, f, lb, ub, u0, max_iter)
        return QpSolution(u, iters, degraded, kkt_residual(H, f, lb, ub, u))

    G = np.asarray(G, dtype=float).reshape(-1, n)
    h = np.asarray(h, dtype=float)
    u = np.clip(np.zeros(n) if u0 is None else np.asarray(u0, dtype=float), lb, ub)
    total = 0
    degraded = True
    while total < max_iter:
        active = (G @ u - h) > 0
        Hm, fm = _frozen_model(H, f, G, h, rho, active)
        cand, iters, bad = _box_active_set(Hm, fm, lb, ub, u, max_iter - total)
        total += iters
        if bad:
            break
        if np.array_equal((G @ cand - h) > 0, active):
            u = cand
            degraded = False
            break
        d = cand - u
        t = _line_search(H, f, G, h, rho, u, d)
        u_next = np.clip(u + t * d, lb, ub)
        if _penalized_objective(H, f, G, h, rho, u_next) >= _penalized_objective(H, f, G, h, rho, u) \
                and np.allclose(u_next, u, rtol=0, atol=1e-15):
            # stalled on a kink of the penalty; the current point is stationary
            degraded = False
            break
        u = u_next
    active = (G @ u - h) > 0
    Hm, fm = _frozen_model(H, f, G, h, rho, active)
    return QpSolution(u, max(total, 1), degraded, kkt_residual(Hm, fm, lb, ub, u))


def qp_cost(H, f, u, const: float = 0.0, G=None, h=None, rho: float = 0.0) -> float:
    u = np.asarray(u, dtype=float)
    cost = 0.5 * u @ H @ u + f @ u + const
    if G is not None and rho > 0 and len(G):
        viol = np.maximum(np.asarray(G) @ u - h, 0.0)
        cost += rho * viol @ viol
    return float(cost)
