"""Luenberger observer for the rear wheel sideslip.

The gain is placed through a single measurement channel (Ackermann's formula
on the dual system) so the result is unique: requesting the open-loop
eigenvalues returns a zero gain. The lateral-acceleration channel is tried
first because, with the measured sideslip difference substituted into the
estimate, the yaw-rate innovation is identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import place_poles

from .ctrl_model import CtrlModel, observability_matrix

DEFAULT_POLES = (-30.0, -40.0)


class ObserverDesignError(ValueError):
    pass


def _ackermann_observer(A: np.ndarray, c: np.ndarray, poles) -> np.ndarray | None:
    O = observability_matrix(A, c.reshape(1, -1))
    if np.linalg.matrix_rank(O) < 2 or abs(np.linalg.det(O)) < 1e-12 * np.linalg.norm(O) ** 2:
        return None
    coeffs = np.real(np.poly(poles))
    phi = A @ A + coeffs[1] * A + coeffs[2] * np.eye(2)
    return phi @ np.linalg.solve(O, np.array([0.0, 1.0]))


def design_gain(m: CtrlModel, poles=DEFAULT_POLES) -> np.ndarray:
    """2x2 gain ``l`` placing the eigenvalues of ``A_c - l C_c`` at ``poles``."""
    poles = np.asarray(poles, dtype=complex)
    if poles.shape != (2,):
        raise ObserverDesignError("exactly two poles are required")
    if np.any(poles.real >= 0):
        raise ObserverDesignError("observer poles must have negative real parts")
    if abs(poles[0].imag) > 0 and not np.isclose(poles[0], np.conj(poles[1])):
        raise ObserverDesignError("complex poles must come as a conjugate pair")
    A, C = m.A_c, m.C_c
    if np.linalg.matrix_rank(observability_matrix(A, C)) < 2:
        raise ObserverDesignError("(A_c, C_c) is not observable")
    gain = np.zeros((2, 2))
    for row in (1, 0):
        col = _ackermann_observer(A, C[row], poles)
        if col is not None:
            gain[:, row] = col
            return gain
    # only jointly observable: fall back to multi-output placement
    return place_poles(A.T, C.T, poles).gain_matrix.T


@dataclass
class ObserverState:
    l_gain: np.ndarray
    x_hat: np.ndarray = field(default_factory=lambda: np.zeros(2))
    fault: bool = False


def observer_error_matrix(m: CtrlModel, l_gain: np.ndarray) -> np.ndarray:
    return m.A_c - l_gain @ m.C_c


def update(o: ObserverState, m: CtrlModel, u: float, y_meas, dt: float,
           x1_meas: float | None = None) -> ObserverState:
    """Euler step of the observer from the current estimate and measurements.

    With ``x1_meas`` (hybrid mode) the first estimate is replaced by the
    measured sideslip difference before the step. A non-finite measurement
    holds the previous estimate and sets ``fault``.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    y = np.asarray(y_meas, dtype=float)
    if not np.all(np.isfinite(y)):
        return replace(o, fault=True)
    x_hat = o.x_hat if x1_meas is None else substitute_x1(o, x1_meas).x_hat
    innovation = y - (m.C_c @ x_hat + m.D_c)
    x_dot = m.A_c @ x_hat + m.B_c * u + m.E_c + o.l_gain @ innovation
    return replace(o, x_hat=x_hat + dt * x_dot, fault=False)


def substitute_x1(o: ObserverState, x1_meas: float) -> ObserverState:
    return replace(o, x_hat=np.array([x1_meas, o.x_hat[1]]))
