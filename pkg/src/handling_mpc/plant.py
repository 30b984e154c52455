"""Nonlinear single-track plant with piecewise-affine tires.

Used as ground truth in closed-loop runs. Speed is held constant; the only
lateral states are body sideslip and yaw rate, plus a global pose so that
path-following scenarios can measure tracking error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .params import VehicleParams

# Saturation onset at mu = 1 [rad]. Scaled linearly with road friction.
FRONT_ALPHA_P_REF = math.radians(1.9)
REAR_ALPHA_P_REF = math.radians(2.0)
POST_SLOPE_RATIO = 0.05

MAX_STEER = math.pi / 4
# divergence guard for |beta| [rad] and |r| [rad/s]
_BETA_LIMIT = 1.0
_YAW_RATE_LIMIT = 5.0


class SimulationFault(RuntimeError):
    """Raised when the plant state becomes non-finite or leaves the sanity envelope."""


@dataclass(frozen=True)
class TireCurve:
    """Axle lateral force law: linear up to ``alpha_p``, shallow slope ``d_post`` beyond."""

    C: float
    alpha_p: float
    d_post: float
    mu: float = 1.0

    def __post_init__(self) -> None:
        if self.C <= 0 or self.alpha_p <= 0:
            raise ValueError("tire C and alpha_p must be > 0")
        if not 0.0 <= self.d_post < self.C:
            raise ValueError("tire d_post must satisfy 0 <= d_post < C")
        if not 0.0 < self.mu <= 1.2:
            raise ValueError("road friction mu must lie in (0, 1.2]")

    @classmethod
    def for_road(cls, C: float, alpha_p_ref: float, mu: float,
                 post_ratio: float = POST_SLOPE_RATIO) -> "TireCurve":
        """Tire on a road with friction ``mu``: breakpoint ``mu * alpha_p_ref``, same C."""
        return cls(C=C, alpha_p=mu * alpha_p_ref, d_post=post_ratio * C, mu=mu)


def default_tires(p: VehicleParams, mu: float,
                  alpha_p_front: float = FRONT_ALPHA_P_REF,
                  alpha_p_rear: float = REAR_ALPHA_P_REF) -> tuple[TireCurve, TireCurve]:
    return (TireCurve.for_road(p.C_f, alpha_p_front, mu),
            TireCurve.for_road(p.C_r, alpha_p_rear, mu))


def tire_force(t: TireCurve, alpha: float) -> float:
    """Lateral force [N]; ``-C * alpha`` in the linear band, odd and continuous."""
    mag = abs(alpha)
    if mag <= t.alpha_p:
        return -t.C * alpha
    return -math.copysign(t.C * t.alpha_p + t.d_post * (mag - t.alpha_p), alpha)


@dataclass(frozen=True)
class PlantState:
    beta: float = 0.0
    r: float = 0.0
    psi: float = 0.0
    X: float = 0.0
    Y: float = 0.0
    v_x: float = 18.06

    def __post_init__(self) -> None:
        if not self.v_x > 0:
            raise ValueError("v_x must be > 0")


@dataclass(frozen=True)
class DriverInput:
    delta_f: float = 0.0
    delta_f_dot: float = 0.0

    def __post_init__(self) -> None:
        if abs(self.delta_f) > MAX_STEER:
            raise ValueError(f"|delta_f| exceeds the steering stop: {self.delta_f}")


def wheel_sideslips(s: PlantState, u: DriverInput, p: VehicleParams) -> tuple[float, float]:
    alpha_f = s.beta + p.l_f / s.v_x * s.r - u.delta_f
    alpha_r = s.beta - p.l_r / s.v_x * s.r
    return alpha_f, alpha_r


@dataclass(frozen=True)
class Plant:
    """Vehicle parameters plus the two axle tire curves."""

    params: VehicleParams
    front: TireCurve
    rear: TireCurve

    @classmethod
    def on_road(cls, p: VehicleParams, mu: float) -> "Plant":
        front, rear = default_tires(p, mu)
        return cls(p, front, rear)

    def axle_forces(self, s: PlantState, u: DriverInput) -> tuple[float, float]:
        alpha_f, alpha_r = wheel_sideslips(s, u, self.params)
        return tire_force(self.front, alpha_f), tire_force(self.rear, alpha_r)

    def derivatives(self, s: PlantState, u: DriverInput, M_z: float) -> tuple[float, float]:
        """Return (dbeta/dt, dr/dt) with cos(delta_f) taken as 1."""
        p = self.params
        F_f, F_r = self.axle_forces(s, u)
        beta_dot = (F_f + F_r) / (p.m * s.v_x) - s.r
        r_dot = (p.l_f * F_f - p.l_r * F_r + M_z) / p.I_z
        if not (math.isfinite(beta_dot) and math.isfinite(r_dot)):
            raise SimulationFault("non-finite plant derivative")
        return beta_dot, r_dot

    def lateral_acceleration(self, s: PlantState, u: DriverInput) -> float:
        F_f, F_r = self.axle_forces(s, u)
        return (F_f + F_r) / self.params.m

    def _rates(self, z: np.ndarray, v_x: float, u: DriverInput, M_z: float) -> np.ndarray:
        beta, r, psi = z[0], z[1], z[2]
        s = PlantState(beta=beta, r=r, psi=psi, v_x=v_x)
        beta_dot, r_dot = self.derivatives(s, u, M_z)
        v_y = v_x * math.tan(beta)
        c, sn = math.cos(psi), math.sin(psi)
        return np.array([beta_dot, r_dot, r, v_x * c - v_y * sn, v_x * sn + v_y * c])

    def step(self, s: PlantState, u: DriverInput, M_z: float, dt: float) -> PlantState:
        """One RK4 step of length ``dt`` with inputs held; ``v_x`` is unchanged."""
        if not 0 < dt <= self.params.T_s:
            raise ValueError(f"dt must lie in (0, T_s], got {dt}")
        z = np.array([s.beta, s.r, s.psi, s.X, s.Y])
        k1 = self._rates(z, s.v_x, u, M_z)
        k2 = self._rates(z + 0.5 * dt * k1, s.v_x, u, M_z)
        k3 = self._rates(z + 0.5 * dt * k2, s.v_x, u, M_z)
        k4 = self._rates(z + dt * k3, s.v_x, u, M_z)
        z = z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(z)) or abs(z[0]) > _BETA_LIMIT or abs(z[1]) > _YAW_RATE_LIMIT:
            raise SimulationFault(f"plant diverged: beta={z[0]:.4g}, r={z[1]:.4g}")
        return replace(s, beta=float(z[0]), r=float(z[1]), psi=float(z[2]),
                       X=float(z[3]), Y=float(z[4]))
