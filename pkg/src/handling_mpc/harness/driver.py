"""Driver-side signals: steer-rate estimate and a preview path follower."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..plant import DriverInput, PlantState
from .scenario import LaneChangePath


@dataclass
class SteerRateFilter:
    """Backward difference of the steer angle through a first-order low-pass."""

    dt: float
    tau: float = 0.02
    prev: float | None = None
    rate: float = 0.0

    def update(self, delta_f: float) -> float:
        if self.prev is not None:
            raw = (delta_f - self.prev) / self.dt
            self.rate += self.dt / (self.tau + self.dt) * (raw - self.rate)
        self.prev = delta_f
        return self.rate


def preview_error(state: PlantState, path: LaneChangePath, preview: float) -> tuple[float, float]:
    """Lateral error [m] at the preview point and the preview distance [m]."""
    dist = state.v_x * preview
    X_p = state.X + dist * math.cos(state.psi)
    Y_p = state.Y + dist * math.sin(state.psi)
    return path.lateral(X_p) - Y_p, dist


def path_follower_steer(state: PlantState, path: LaneChangePath, preview: float, *,
                        k_p: float = 0.6, delta_prev: float = 0.0, dt: float = 0.005,
                        rate_limit: float = 0.5, max_steer: float = math.radians(10.0)) -> DriverInput:
    """Proportional steer toward the preview point, rate- and magnitude-limited."""
    if not preview > 0:
        raise ValueError("preview must be > 0")
    err, dist = preview_error(state, path, preview)
    target = k_p * err / dist
    step = rate_limit * dt
    delta = min(max(target, delta_prev - step), delta_prev + step)
    delta = min(max(delta, -max_steer), max_steer)
    return DriverInput(delta_f=delta, delta_f_dot=(delta - delta_prev) / dt)
