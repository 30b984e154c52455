import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from handling_mpc import baseline
from handling_mpc.ctrl_model import build_continuous
from handling_mpc.params import VehicleParams

P = VehicleParams()


def test_sign_convention():
    assert baseline.sign(0.0) == 1.0 and baseline.sign(-1e-300) == -1.0
    assert baseline.sliding_surface(-0.01, 0.002) == pytest.approx(0.008)


def test_gain_validation():
    with pytest.raises(ValueError):
        baseline.SlidingConfig(lam=0.0)


@given(st.floats(-0.03, 0.03), st.floats(-0.03, 0.03), st.floats(5.0, 40.0),
       st.floats(-0.07, 0.07), st.floats(-0.5, 0.5), st.floats(0.5, 50.0), st.floats(0.0, 0.01))
def test_sliding_condition_exact_on_design_model(x1, x2, v, delta, dd, lam, zeta):
    cfg = baseline.SlidingConfig(lam=lam, zeta=zeta)
    s = baseline.sliding_surface(x1, zeta)
    M = baseline.control_law(s, x1, dd, x1 + x2, x2, P, v, cfg)
    m = build_continuous(P, v, delta, dd)
    x1_dot = m.A_c[0] @ np.array([x1, x2]) + m.B_c[0] * M + m.E_c[0]
    s_dot = baseline.sign(x1) * x1_dot
    assert abs(s_dot + lam * s) <= 1e-9 * max(1.0, abs(lam * s))


@given(st.floats(-0.1, 0.1), st.floats(-0.1, 0.1), st.floats(-5.0, 5.0))
def test_clamped_output_within_envelope(x1, x2, dd):
    cfg = baseline.SlidingConfig(lam=50.0)
    s = baseline.sliding_surface(x1, 0.0)
    M = baseline.control_law(s, x1, dd, x1 + x2, x2, P, 18.06, cfg, (-1334.2, 1334.2))
    assert -1334.2 <= M <= 1334.2


def test_feedback_pushes_into_the_turn():
    # left turn, |x1| beyond zeta: the surface term adds a positive moment
    x1, x2 = -math.radians(0.3), -math.radians(0.8)
    cfg = baseline.SlidingConfig(lam=5.0, zeta=math.radians(0.03))
    s = baseline.sliding_surface(x1, cfg.zeta)
    with_fb = baseline.control_law(s, x1, 0.0, x1 + x2, x2, P, 18.06, cfg)
    without = baseline.control_law(0.0, x1, 0.0, x1 + x2, x2, P, 18.06, cfg)
    assert with_fb - without == pytest.approx(P.I_z * 18.06 / P.L * 5.0 * s, rel=1e-12)
    assert with_fb > without
