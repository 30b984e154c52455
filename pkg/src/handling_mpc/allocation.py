"""Daisy-chain split of a yaw moment onto the two rear in-wheel motors.

Positive (propulsive) torque on a single wheel is used first; the opposite
wheel only brakes once the first one is at its limit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .params import VehicleParams

SINGLE_WHEEL = "single"
TWO_WHEEL = "two-wheel"
SATURATED = "saturated"


@dataclass(frozen=True)
class TorqueCommand:
    T_rl: float
    T_rr: float
    branch: str = SINGLE_WHEEL
    shortfall: float = 0.0


def max_yaw_moment(T_max: float, p: VehicleParams) -> float:
    """Yaw moment [N m] from one motor at ``T_max``; never negative."""
    if T_max < 0:
        raise ValueError("T_max must be >= 0")
    return p.l_w / 2.0 * T_max / p.r_w


def yaw_moment(cmd: TorqueCommand, p: VehicleParams) -> float:
    return p.l_w / (2.0 * p.r_w) * (cmd.T_rr - cmd.T_rl)


def yaw_moment_bounds(T_max: float, p: VehicleParams, two_wheel: bool = True) -> tuple[float, float]:
    """Symmetric input bound for the controller; both wheels by default."""
    limit = max_yaw_moment(T_max, p) * (2.0 if two_wheel else 1.0)
    return -limit, limit


def allocate(M_z: float, T_max: float, p: VehicleParams) -> TorqueCommand:
    if T_max < 0:
        raise ValueError("T_max must be >= 0")
    M_max = max_yaw_moment(T_max, p)
    k = 2.0 * p.r_w / p.l_w
    # the min/max below only guard the last ulp at the branch edges
    if abs(M_z) <= M_max:
        drive = min(k * abs(M_z), T_max)
        if M_z >= 0:
            return TorqueCommand(T_rl=0.0, T_rr=drive)
        return TorqueCommand(T_rl=drive, T_rr=0.0)
    if abs(M_z) <= 2.0 * M_max:
        brake = max(-k * (abs(M_z) - M_max), -T_max)
        if M_z >= 0:
            return TorqueCommand(T_rl=brake, T_rr=T_max, branch=TWO_WHEEL)
        return TorqueCommand(T_rl=T_max, T_rr=brake, branch=TWO_WHEEL)
    # beyond what both motors can deliver: pin both at the limits
    if M_z >= 0:
        return TorqueCommand(T_rl=-T_max, T_rr=T_max, branch=SATURATED,
                             shortfall=M_z - 2.0 * M_max)
    return TorqueCommand(T_rl=T_max, T_rr=-T_max, branch=SATURATED,
                         shortfall=M_z + 2.0 * M_max)
