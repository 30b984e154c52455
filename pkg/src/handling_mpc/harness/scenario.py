"""Scenario description, steering profiles and the run configuration bundle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..baseline import SlidingConfig
from ..mpc import MpcConfig
from ..params import MotorTorqueCurve, VehicleParams
from ..plant import FRONT_ALPHA_P_REF, POST_SLOPE_RATIO, REAR_ALPHA_P_REF

STEER_PROFILES = ("constant", "ramp-hold", "sine-dwell", "table")
DRIVERS = ("none", "path-follower")
CONTROLLERS = ("none", "mpc", "conventional")


@dataclass(frozen=True)
class SteerProfile:
    """Road-wheel steer angle [rad] as a function of time.

    ``ramp-hold``: zero until ``start``, linear ramp to ``amplitude`` over
    ``ramp_time``, then held. ``sine-dwell``: one sine period at ``frequency``
    with a dwell of ``dwell_time`` at the second peak. ``table``: linear
    interpolation through ``times``/``values``.
    """

    kind: str = "ramp-hold"
    amplitude: float = math.radians(2.0)
    start: float = 0.5
    ramp_time: float = 1.0
    frequency: float = 0.7
    dwell_time: float = 0.5
    times: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in STEER_PROFILES:
            raise ValueError(f"unknown steer profile {self.kind!r}")
        if self.kind == "table" and (len(self.times) < 2 or len(self.times) != len(self.values)):
            raise ValueError("table steer profile needs matching times/values (>= 2)")

    def __call__(self, t: float) -> float:
        A = self.amplitude
        if self.kind == "constant":
            return A
        if self.kind == "ramp-hold":
            if t <= self.start:
                return 0.0
            return A * min((t - self.start) / self.ramp_time, 1.0) if self.ramp_time > 0 else A
        if self.kind == "sine-dwell":
            tau = t - self.start
            period = 1.0 / self.frequency
            if tau <= 0:
                return 0.0
            t_peak = 0.75 * period
            if tau <= t_peak:
                return A * math.sin(2 * math.pi * self.frequency * tau)
            if tau <= t_peak + self.dwell_time:
                return -A
            tau -= self.dwell_time
            return A * math.sin(2 * math.pi * self.frequency * tau) if tau <= period else 0.0
        return float(np.interp(t, self.times, self.values))


@dataclass(frozen=True)
class LaneChangePath:
    """Piecewise-linear double lane change: lateral offset ``Y_ref(X)``."""

    start: float = 30.0
    transition: float = 25.0
    hold: float = 25.0
    offset: float = 3.5

    def knots(self) -> tuple[np.ndarray, np.ndarray]:
        x0 = self.start
        xs = [x0, x0 + self.transition, x0 + self.transition + self.hold,
              x0 + 2 * self.transition + self.hold]
        return np.array(xs), np.array([0.0, self.offset, self.offset, 0.0])

    def lateral(self, X: float) -> float:
        xs, ys = self.knots()
        return float(np.interp(X, xs, ys))


@dataclass(frozen=True)
class Scenario:
    name: str = "mild"
    mu: float = 0.85
    v_x: float = 65.0 / 3.6
    steer: SteerProfile = field(default_factory=SteerProfile)
    driver: str = "none"
    controller: str = "none"
    duration: float = 4.5
    control_enable_time: float = 1.0
    path: LaneChangePath = field(default_factory=LaneChangePath)
    sensor_noise: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError("scenario duration must be > 0")
        if not 0 < self.mu <= 1.2:
            raise ValueError("scenario mu must lie in (0, 1.2]")
        if not self.v_x > 0:
            raise ValueError("scenario v_x must be > 0")
        if self.driver not in DRIVERS:
            raise ValueError(f"unknown driver {self.driver!r}")
        if self.controller not in CONTROLLERS:
            raise ValueError(f"unknown controller {self.controller!r}")


@dataclass(frozen=True)
class PlantConfig:
    dt: float = 0.001
    alpha_p_front: float = FRONT_ALPHA_P_REF
    alpha_p_rear: float = REAR_ALPHA_P_REF
    post_ratio: float = POST_SLOPE_RATIO


@dataclass(frozen=True)
class ObserverConfig:
    poles: tuple[float, float] = (-30.0, -40.0)
    hybrid: bool = True


@dataclass(frozen=True)
class DriverConfig:
    steer_rate_tau: float = 0.02  # low-pass on the differentiated steer [s]
    preview_time: float = 0.5
    k_p: float = 0.6
    rate_limit: float = 0.5  # road wheel [rad/s]
    max_steer: float = math.radians(10.0)


@dataclass(frozen=True)
class ControlConfig:
    two_wheel_bound: bool = True
    steer_threshold: float = math.radians(0.2)  # controller idles below this |delta_f|
    oscillation_window: float = 0.5
    oscillation_depth: float = 0.5  # swing size counted, as a fraction of the bound


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario = field(default_factory=Scenario)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    motor: MotorTorqueCurve = field(default_factory=MotorTorqueCurve)
    mpc: MpcConfig = field(default_factory=MpcConfig)
    sliding: SlidingConfig = field(default_factory=SlidingConfig)
    plant: PlantConfig = field(default_factory=PlantConfig)
    observer: ObserverConfig = field(default_factory=ObserverConfig)
    driver: DriverConfig = field(default_factory=DriverConfig)
    control: ControlConfig = field(default_factory=ControlConfig)
