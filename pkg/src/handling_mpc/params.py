"""Vehicle constants, motor torque envelope and the understeer gain."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the B-class test vehicle (defaults from its data sheet).

    ``I_z`` defaults to ``m * l_f * l_r`` (dynamic index of one) when not given.
    """

    m: float = 1140.0
    l_f: float = 1.165
    l_r: float = 1.165
    C_f: float = 150000.0
    C_r: float = 170000.0
    r_w: float = 0.333
    l_w: float = 1.481
    g: float = 9.81
    T_s: float = 0.005
    I_z: float | None = None

    def __post_init__(self) -> None:
        if self.I_z is None:
            object.__setattr__(self, "I_z", self.m * self.l_f * self.l_r)
        for name in ("m", "l_f", "l_r", "C_f", "C_r", "r_w", "l_w", "g", "T_s", "I_z"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"VehicleParams.{name} must be finite and > 0, got {value!r}")

    @property
    def L(self) -> float:
        return self.l_f + self.l_r


def understeer_gain(p: VehicleParams) -> float:
    """Steady-state understeer gain [s^2/m]; positive means understeering."""
    return p.m * p.l_r / (p.C_f * p.L) - p.m * p.l_f / (p.C_r * p.L)


@dataclass(frozen=True)
class MotorTorqueCurve:
    """Peak torque of one in-wheel motor as a function of wheel speed.

    ``speeds`` [rad/s] and ``torques`` [N m] form an interpolation table. The
    minimum torque is the mirror image, ``T_min(w) = -T_max(w)``.
    """

    T_base: float = 300.0
    P_max: float = 40000.0
    speeds: tuple[float, ...] = field(default=())
    torques: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.T_base <= 0 or self.P_max <= 0:
            raise ValueError("T_base and P_max must be > 0")
        if not self.speeds:
            speeds, torques = _power_limited_table(self.T_base, self.P_max)
            object.__setattr__(self, "speeds", speeds)
            object.__setattr__(self, "torques", torques)
        w = np.asarray(self.speeds, dtype=float)
        t = np.asarray(self.torques, dtype=float)
        if w.shape != t.shape or w.size < 2:
            raise ValueError("speed/torque table needs >= 2 matching entries")
        if np.any(np.diff(w) <= 0):
            raise ValueError("table speeds must be strictly increasing")
        if np.any(t < 0) or np.any(np.diff(t) > 0):
            raise ValueError("table torques must be non-negative and non-increasing")


def _power_limited_table(T_base: float, P_max: float, w_top: float = 250.0, n: int = 24):
    # flat up to the base speed, constant power above it
    w_base = P_max / T_base
    speeds = [0.0, w_base]
    torques = [T_base, T_base]
    if w_top > w_base:
        for w in np.linspace(w_base, w_top, n + 1)[1:]:
            speeds.append(float(w))
            torques.append(P_max / float(w))
    return tuple(speeds), tuple(torques)


def max_motor_torque(curve: MotorTorqueCurve, v_x: float, r_w: float) -> float:
    """Peak motor torque [N m] at vehicle speed ``v_x``; clamps beyond the table."""
    if v_x < 0:
        raise ValueError("v_x must be >= 0")
    omega = v_x / r_w
    return float(np.interp(omega, curve.speeds, curve.torques))
