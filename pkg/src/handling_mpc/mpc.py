"""Receding-horizon controller on the sideslip-difference model.

The horizon-``N`` problem is condensed into a dense QP over the input sequence.
Input bounds are hard; the state bounds become quadratically penalized rows so
the problem stays feasible from any initial state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ctrl_model import CtrlModel
from .qp import QpSolution, qp_cost, solve_qp


@dataclass(frozen=True)
class MpcConfig:
    """Horizon, weights, set values and state bounds.

    Angles are in radians and stated for a turn where the sideslip difference
    is positive; :func:`control_step` mirrors them to the current turn.
    """

    N: int = 5
    Q: tuple[float, float] = (1000.0, 1.0)
    R: float = 1e-12
    W: float = 1e-10
    zeta: float = math.radians(0.03)
    alpha_r_des: float = math.radians(0.5)
    zeta_min: float = 0.0
    zeta_max: float = math.radians(0.1)
    alpha_r_min: float = math.radians(-2.0)
    alpha_r_max: float = math.radians(2.0)
    slack_penalty: float = 1e4

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError("horizon N must be >= 1")
        if min(self.Q) < 0 or self.R < 0 or self.W < 0:
            raise ValueError("weights must be non-negative")
        if self.R + self.W <= 0:
            raise ValueError("R + W must be > 0 for a strictly convex problem")
        if not (self.zeta_min < self.zeta_max and self.alpha_r_min < self.alpha_r_max):
            raise ValueError("state bounds need min < max")
        if self.slack_penalty < 0:
            raise ValueError("slack_penalty must be >= 0")

    @property
    def x_ref(self) -> np.ndarray:
        return np.array([self.zeta, self.alpha_r_des])

    @property
    def x_min(self) -> np.ndarray:
        return np.array([self.zeta_min, self.alpha_r_min])

    @property
    def x_max(self) -> np.ndarray:
        return np.array([self.zeta_max, self.alpha_r_max])


@dataclass
class QpProblem:
    """``J(U) = 0.5 U'HU + f'U + const + rho * |max(0, G U - h)|^2``."""

    H: np.ndarray
    f: np.ndarray
    const: float
    u_lb: np.ndarray
    u_ub: np.ndarray
    G: np.ndarray
    h: np.ndarray
    rho: float
    # predicted states are ``Phi_x0 + Gamma @ U``, stacked [x(1); ...; x(N)]
    Gamma: np.ndarray = field(repr=False, default=None)
    free_response: np.ndarray = field(repr=False, default=None)

    def predict(self, U) -> np.ndarray:
        return (self.free_response + self.Gamma @ np.asarray(U, dtype=float)).reshape(-1, 2)

    def cost(self, U) -> float:
        return qp_cost(self.H, self.f, U, self.const, self.G, self.h, self.rho)


def prediction_matrices(A: np.ndarray, B: np.ndarray, E: np.ndarray, x0, N: int):
    """Free response and input-to-state map of ``x(k+1) = A x(k) + B u(k) + E``."""
    free = np.zeros(2 * N)
    Gamma = np.zeros((2 * N, N))
    x = np.asarray(x0, dtype=float)
    powers = [np.eye(2)]
    for k in range(N):
        x = A @ x + E
        free[2 * k:2 * k + 2] = x
        for j in range(k + 1):
            Gamma[2 * k:2 * k + 2, j] = powers[k - j] @ B
        powers.append(A @ powers[-1])
    return free, Gamma


def condense(m: CtrlModel, cfg: MpcConfig, x0, u_prev: float,
             u_bounds: tuple[float, float] = (-np.inf, np.inf),
             x_ref=None, x_min=None, x_max=None) -> QpProblem:
    """Dense QP for the horizon problem starting from ``x0``.

    ``x_ref``, ``x_min`` and ``x_max`` default to the unmirrored values of ``cfg``.
    """
    if not m.is_discrete:
        raise ValueError("condense needs a discretized model")
    x0 = np.asarray(x0, dtype=float)
    if not (np.all(np.isfinite(x0)) and math.isfinite(u_prev)):
        raise ValueError("non-finite initial state or previous input")
    for mat in (m.A_d, m.B_d, m.E_d):
        if not np.all(np.isfinite(mat)):
            raise ValueError("non-finite model matrices")
    N = cfg.N
    x_ref = cfg.x_ref if x_ref is None else np.asarray(x_ref, dtype=float)
    x_min = cfg.x_min if x_min is None else np.asarray(x_min, dtype=float)
    x_max = cfg.x_max if x_max is None else np.asarray(x_max, dtype=float)

    free, Gamma = prediction_matrices(m.A_d, m.B_d, m.E_d, x0, N)
    Qbar = np.kron(np.eye(N), np.diag(cfg.Q))
    Dm = np.eye(N) - np.eye(N, k=-1)
    e0 = np.zeros(N)
    e0[0] = 1.0
    c = free - np.tile(x_ref, N)
    d = u_prev * e0
    H = 2.0 * (Gamma.T @ Qbar @ Gamma + cfg.R * np.eye(N) + cfg.W * Dm.T @ Dm)
    H = 0.5 * (H + H.T)
    f = 2.0 * (Gamma.T @ Qbar @ c - cfg.W * Dm.T @ d)
    const = float(c @ Qbar @ c + cfg.W * d @ d)

    rows, rhs = [], []
    lo, hi = np.tile(x_min, N), np.tile(x_max, N)
    for i in range(2 * N):
        if math.isfinite(hi[i]):
            rows.append(Gamma[i])
            rhs.append(hi[i] - free[i])
        if math.isfinite(lo[i]):
            rows.append(-Gamma[i])
            rhs.append(free[i] - lo[i])
    G = np.array(rows).reshape(-1, N)
    h = np.array(rhs)
    lb, ub = u_bounds
    return QpProblem(H=H, f=f, const=const, u_lb=np.full(N, float(lb)),
                     u_ub=np.full(N, float(ub)), G=G, h=h, rho=cfg.slack_penalty,
                     Gamma=Gamma, free_response=free)


def solve(qp: QpProblem, u0=None) -> QpSolution:
    return solve_qp(qp.H, qp.f, qp.u_lb, qp.u_ub, qp.G, qp.h, qp.rho, u0=u0)


def turn_sign(x1: float) -> float:
    return 1.0 if x1 >= 0 else -1.0


def mirrored_targets(cfg: MpcConfig, sign: float):
    """Reference and bounds for the current turn direction."""
    x_ref = sign * cfg.x_ref
    lo, hi = sign * cfg.x_min, sign * cfg.x_max
    return x_ref, np.minimum(lo, hi), np.maximum(lo, hi)


@dataclass
class MpcResult:
    M_z: float
    sequence: np.ndarray
    slack: float
    iterations: int
    predicted_min: np.ndarray
    predicted_max: np.ndarray
    fault: bool = False
    degraded: bool = False


def control_step(x1_meas: float, x2_hat: float, m: CtrlModel, cfg: MpcConfig,
                 u_prev: float, u_bounds: tuple[float, float],
                 warm_start=None) -> MpcResult:
    """Solve the horizon problem and return its first input, clamped to ``u_bounds``.

    Any solver or model fault yields ``M_z = 0`` with ``fault`` set.
    """
    N = cfg.N
    lb, ub = u_bounds
    sign = turn_sign(x1_meas)
    x_ref, x_min, x_max = mirrored_targets(cfg, sign)
    try:
        qp = condense(m, cfg, [x1_meas, x2_hat], u_prev, u_bounds, x_ref, x_min, x_max)
        sol = solve(qp, warm_start)
    except (ValueError, np.linalg.LinAlgError):
        nan = np.full(2, np.nan)
        return MpcResult(0.0, np.zeros(N), 0.0, 0, nan, nan, fault=True)
    # the reported trajectory starts at x(0|t) so a present excursion is visible too
    X = np.vstack([[x1_meas, x2_hat], qp.predict(sol.u)])
    excess = np.maximum(np.maximum(X - x_max, x_min - X), 0.0)
    M_z = float(min(max(sol.u[0], lb), ub))
    return MpcResult(M_z=M_z, sequence=sol.u, slack=float(excess.max()),
                     iterations=sol.iterations, predicted_min=X.min(axis=0),
                     predicted_max=X.max(axis=0), degraded=sol.degraded)


def shifted(sequence: np.ndarray) -> np.ndarray:
    """Warm start for the next period: drop the applied input, repeat the last."""
    return np.concatenate([sequence[1:], sequence[-1:]])
