"""Conventional sliding-surface yaw-moment law used as the comparison controller."""

from __future__ import annotations

from dataclasses import dataclass

from .params import VehicleParams


@dataclass(frozen=True)
class SlidingConfig:
    lam: float = 5.0
    zeta: float = 0.0

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError("sliding gain lam must be > 0")


def sign(x: float) -> float:
    # sign(0) is taken as +1 so the law is defined on the crossing
    return 1.0 if x >= 0 else -1.0


def sliding_surface(x1: float, zeta: float) -> float:
    return sign(x1) * x1 - zeta


def control_law(s: float, x1: float, delta_f_dot: float, alpha_f_est: float,
                alpha_r_est: float, p: VehicleParams, v_x: float, cfg: SlidingConfig,
                u_bounds: tuple[float, float] | None = None) -> float:
    """Yaw moment that enforces ``ds/dt = -lam * s`` on the linear-tire model.

    Tire forces are the linear estimates ``-C * alpha``. With ``u_bounds`` the
    result is clamped to the actuator envelope.
    """
    F_yf = -p.C_f * alpha_f_est
    F_yr = -p.C_r * alpha_r_est
    k = p.I_z * v_x / p.L
    M_z = -p.l_f * F_yf + p.l_r * F_yr + k * delta_f_dot - sign(x1) * k * cfg.lam * s
    if u_bounds is not None:
        M_z = min(max(M_z, u_bounds[0]), u_bounds[1])
    return M_z
