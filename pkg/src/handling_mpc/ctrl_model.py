"""Linear model in sideslip-difference coordinates.

State ``x = [alpha_f - alpha_r, alpha_r]``, output ``y = [r, a_y]``, input the
corrective yaw moment ``M_z``. The affine terms depend on the driver's steer.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .params import VehicleParams


@dataclass(frozen=True)
class CtrlModel:
    A_c: np.ndarray
    B_c: np.ndarray
    E_c: np.ndarray
    C_c: np.ndarray
    D_c: np.ndarray
    A_d: np.ndarray | None = None
    B_d: np.ndarray | None = None
    E_d: np.ndarray | None = None
    C_d: np.ndarray | None = None
    D_d: np.ndarray | None = None
    T_s: float | None = None

    @property
    def is_discrete(self) -> bool:
        return self.A_d is not None


def state_matrices(p: VehicleParams, v_x: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The steer-independent part ``(A_c, B_c, C_c)``."""
    if not v_x > 0:
        raise ValueError(f"v_x must be > 0, got {v_x}")
    m, l_f, l_r, C_f, C_r, I_z, L = p.m, p.l_f, p.l_r, p.C_f, p.C_r, p.I_z, p.L
    A = np.array([
        [-l_f * C_f * L / (I_z * v_x),
         L / (I_z * v_x) * (-l_f * C_f + l_r * C_r)],
        [-C_f / (m * v_x) + l_f * l_r * C_f / (I_z * v_x) - v_x / L,
         -(C_f + C_r) / (m * v_x) + l_f * l_r * C_f / (I_z * v_x) - l_r**2 * C_r / (I_z * v_x)],
    ])
    B = np.array([L / (I_z * v_x), -l_r / (I_z * v_x)])
    C = np.array([
        [v_x / L, 0.0],
        [-C_f / m, -(C_f + C_r) / m],
    ])
    return A, B, C


def build_continuous(p: VehicleParams, v_x: float, delta_f: float,
                     delta_f_dot: float) -> CtrlModel:
    A, B, C = state_matrices(p, v_x)
    E = np.array([-delta_f_dot, -v_x / p.L * delta_f])
    D = np.array([v_x / p.L * delta_f, 0.0])
    return CtrlModel(A_c=A, B_c=B, E_c=E, C_c=C, D_c=D)


def discretize(m: CtrlModel, T_s: float) -> CtrlModel:
    """Forward-Euler discretization with sampling period ``T_s``."""
    if not T_s > 0:
        raise ValueError("T_s must be > 0")
    return replace(
        m,
        A_d=np.eye(2) + T_s * m.A_c,
        B_d=T_s * m.B_c,
        E_d=T_s * m.E_c,
        C_d=m.C_c.copy(),
        D_d=m.D_c.copy(),
        T_s=T_s,
    )


def measure_x1(r: float, delta_f: float, v_x: float, p: VehicleParams) -> float:
    """Sideslip difference from yaw rate and steer only (no body sideslip needed)."""
    if not v_x > 0:
        raise ValueError("v_x must be > 0")
    return p.L / v_x * r - delta_f


def observability_matrix(A: np.ndarray, C: np.ndarray) -> np.ndarray:
    return np.vstack([C, C @ A])
