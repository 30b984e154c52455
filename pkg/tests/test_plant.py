import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import fsolve

from handling_mpc.ctrl_model import build_continuous
from handling_mpc.params import VehicleParams
from handling_mpc.plant import (DriverInput, Plant, PlantState, SimulationFault, TireCurve,
                                default_tires, tire_force, wheel_sideslips)

P = VehicleParams()
V = 18.06


def linear_plant(p=P):
    # breakpoints far away: the plant is the linear bicycle model
    return Plant(p, TireCurve(p.C_f, 1.0, 0.0), TireCurve(p.C_r, 1.0, 0.0))


# --- tire -------------------------------------------------------------------

def test_tire_examples():
    t = TireCurve(C=150000.0, alpha_p=0.03, d_post=0.05 * 150000.0)
    assert tire_force(t, 0.0) == 0.0
    assert tire_force(t, 0.03) == pytest.approx(-150000.0 * 0.03, rel=1e-15)
    assert tire_force(t, 0.06) == pytest.approx(-150000.0 * 0.03 * 1.05, rel=1e-14)


def test_for_road_scales_breakpoint():
    t = TireCurve.for_road(1.0e5, 0.04, 0.5, 0.05)
    assert t.alpha_p == pytest.approx(0.02) and t.d_post == pytest.approx(5000.0)


@pytest.mark.parametrize("kw", [dict(C=0.0, alpha_p=0.1, d_post=0.0),
                                dict(C=1.0, alpha_p=0.0, d_post=0.0),
                                dict(C=1.0, alpha_p=0.1, d_post=1.0),
                                dict(C=1.0, alpha_p=0.1, d_post=0.0, mu=0.0)])
def test_tire_validation(kw):
    with pytest.raises(ValueError):
        TireCurve(**kw)


tires = st.builds(TireCurve, C=st.floats(1e3, 3e5), alpha_p=st.floats(1e-3, 0.2),
                  d_post=st.just(0.0) | st.floats(0.0, 900.0))
angles = st.floats(-0.5, 0.5)


@given(tires, angles)
def test_tire_odd(t, a):
    assert tire_force(t, -a) == -tire_force(t, a)


@given(tires, angles, angles)
def test_tire_magnitude_monotone(t, a, b):
    if abs(a) <= abs(b):
        assert abs(tire_force(t, a)) <= abs(tire_force(t, b)) + 1e-9


@given(tires, st.floats(-1e-6, 1e-6))
def test_tire_continuous_at_breakpoint(t, eps):
    a = t.alpha_p + eps
    assert abs(tire_force(t, a) + t.C * t.alpha_p) <= t.C * 1e-6 + 1e-9


# --- kinematics and derivatives ----------------------------------------------

def test_wheel_sideslip_examples():
    assert wheel_sideslips(PlantState(beta=0.01), DriverInput(), P) == (0.01, 0.01)
    af, ar = wheel_sideslips(PlantState(r=0.1, v_x=V), DriverInput(delta_f=0.05), P)
    assert af == pytest.approx(1.165 / 18.06 * 0.1 - 0.05, abs=1e-15)
    assert ar == pytest.approx(-1.165 / 18.06 * 0.1, abs=1e-15)


@given(st.floats(-0.1, 0.1), st.floats(-1, 1), st.floats(-0.3, 0.3), st.floats(3, 40))
def test_sideslip_difference_identity(beta, r, delta, v):
    af, ar = wheel_sideslips(PlantState(beta=beta, r=r, v_x=v), DriverInput(delta_f=delta), P)
    assert af - ar == pytest.approx(P.L / v * r - delta, abs=1e-14)


def test_derivatives_at_origin_and_pure_moment():
    plant = Plant.on_road(P, 0.85)
    assert plant.derivatives(PlantState(), DriverInput(), 0.0) == (0.0, 0.0)
    _, r_dot = plant.derivatives(PlantState(), DriverInput(), 222.4)
    assert r_dot == pytest.approx(0.14374014573725477, rel=1e-12)  # 222.4 / (m l_f l_r)


@given(st.floats(-0.2, 0.2), st.floats(-0.2, 0.2), st.floats(-0.3, 0.3),
       st.floats(-3000, 3000), st.floats(-0.5, 0.5), st.floats(5, 40))
def test_small_slip_matches_ltimodel(af_frac, ar_frac, delta_deg, M_z, delta_dot, v):
    plant = Plant.on_road(P, 0.85)
    af = af_frac * plant.front.alpha_p
    ar = ar_frac * plant.rear.alpha_p
    delta = math.radians(delta_deg)
    # invert the sideslip relations for (beta, r)
    r = (af - ar + delta) * v / P.L
    beta = ar + P.l_r / v * r
    s, u = PlantState(beta=beta, r=r, v_x=v), DriverInput(delta, delta_dot)
    beta_dot, r_dot = plant.derivatives(s, u, M_z)
    x_dot_plant = np.array([P.L / v * r_dot - delta_dot, beta_dot - P.l_r / v * r_dot])
    m = build_continuous(P, v, delta, delta_dot)
    x_dot_model = m.A_c @ np.array([af - ar, ar]) + m.B_c * M_z + m.E_c
    scale = max(np.max(np.abs(x_dot_model)), 1e-12)
    assert np.max(np.abs(x_dot_plant - x_dot_model)) / scale <= 1e-9


def test_lateral_acceleration_matches_output_map():
    plant = linear_plant()
    s, u = PlantState(beta=0.004, r=0.05, v_x=V), DriverInput(delta_f=0.01, delta_f_dot=0.02)
    af, ar = wheel_sideslips(s, u, P)
    m = build_continuous(P, V, u.delta_f, u.delta_f_dot)
    y = m.C_c @ np.array([af - ar, ar]) + m.D_c
    assert plant.lateral_acceleration(s, u) == pytest.approx(y[1], abs=1e-12)
    assert s.r == pytest.approx(y[0], abs=1e-15)
    assert plant.lateral_acceleration(PlantState(), DriverInput()) == 0.0


def test_origin_asymptotically_stable():
    plant = Plant.on_road(P, 0.85)
    eps = 1e-7
    J = np.zeros((2, 2))
    for j in range(2):
        dz = np.zeros(2)
        dz[j] = eps
        hi = plant.derivatives(PlantState(beta=dz[0], r=dz[1]), DriverInput(), 0.0)
        lo = plant.derivatives(PlantState(beta=-dz[0], r=-dz[1]), DriverInput(), 0.0)
        J[:, j] = (np.array(hi) - np.array(lo)) / (2 * eps)
    assert np.all(np.linalg.eigvals(J).real < 0)


# --- integration -------------------------------------------------------------

def test_zero_stays_zero():
    s = Plant.on_road(P, 0.85).step(PlantState(), DriverInput(), 0.0, 0.001)
    assert (s.beta, s.r, s.psi, s.Y) == (0.0, 0.0, 0.0, 0.0)
    assert s.X == pytest.approx(V * 0.001)


def _trajectory(dt, T=1.0):
    plant = linear_plant()
    s = PlantState(v_x=V)
    u = DriverInput(delta_f=0.02)
    for _ in range(int(round(T / dt))):
        s = plant.step(s, u, 150.0, dt)
    return np.array([s.beta, s.r, s.psi, s.X, s.Y])


def test_rk4_fourth_order():
    ref = _trajectory(0.0005)
    e1 = np.max(np.abs(_trajectory(0.005) - ref))
    e2 = np.max(np.abs(_trajectory(0.0025) - ref))
    ratio = e1 / e2
    assert 12.0 < ratio < 20.0  # 2**4 = 16


def test_step_rejects_bad_dt():
    plant = Plant.on_road(P, 0.85)
    for dt in (0.0, -0.001, 0.006):
        with pytest.raises(ValueError):
            plant.step(PlantState(), DriverInput(), 0.0, dt)


def test_divergence_raises_fault():
    plant = Plant.on_road(P, 0.85)
    with pytest.raises(SimulationFault):
        plant.step(PlantState(r=4.999), DriverInput(), 1e7, 0.005)


def test_steer_stop():
    with pytest.raises(ValueError):
        DriverInput(delta_f=1.0)


def _equilibrium(plant, delta, v=V):
    u = DriverInput(delta_f=delta)

    def f(z):
        return plant.derivatives(PlantState(beta=z[0], r=z[1], v_x=v), u, 0.0)

    guess = [0.0, v * delta / (P.L + 4.47e-4 * v * v)]
    z, _, ok, _ = fsolve(f, guess, full_output=True, xtol=1e-13)
    assert ok == 1
    return wheel_sideslips(PlantState(beta=z[0], r=z[1], v_x=v), u, P), z


@given(st.floats(0.05, 3.0), st.booleans(), st.sampled_from([0.5, 0.85, 1.0]))
def test_equilibrium_understeer(deg, left, mu):
    delta = math.radians(deg) * (1 if left else -1)
    (af, ar), z = _equilibrium(Plant(P, *default_tires(P, mu)), delta)
    assert abs(af) > abs(ar)
    # steady circular motion: a_y = v r
    plant = Plant(P, *default_tires(P, mu))
    ay = plant.lateral_acceleration(PlantState(beta=z[0], r=z[1], v_x=V), DriverInput(delta))
    assert ay == pytest.approx(V * z[1], rel=1e-8)
