"""Closed-loop orchestration: plant -> sensors -> observer -> controller -> allocation."""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .. import allocation, baseline, mpc, observer
from ..ctrl_model import CtrlModel, discretize, measure_x1, state_matrices
from ..params import max_motor_torque
from ..plant import DriverInput, Plant, PlantState, SimulationFault, TireCurve, wheel_sideslips
from .driver import SteerRateFilter, path_follower_steer
from .scenario import RunConfig, Scenario

log = logging.getLogger(__name__)

# telemetry flag bits
FLAG_ACTIVE = 1
FLAG_SOLVER_FAULT = 2
FLAG_DEGRADED = 4
FLAG_OBSERVER_FAULT = 8
FLAG_SHORTFALL = 16
FLAG_AT_BOUND = 32
FLAG_UNSTABLE = 64

TELEMETRY_FIELDS = ("t", "delta_f", "v_x", "beta", "r", "a_y", "alpha_f", "alpha_r", "x1",
                    "x2_hat", "M_z", "T_rl", "T_rr", "slack", "solver_iters", "flags")


@dataclass
class TelemetryRecord:
    t: float
    delta_f: float
    v_x: float
    beta: float
    r: float
    a_y: float
    alpha_f: float
    alpha_r: float
    x1: float
    x2_hat: float
    M_z: float
    T_rl: float
    T_rr: float
    slack: float
    solver_iters: int
    flags: int


@dataclass
class RunSummary:
    scenario: str
    controller: str
    mu: float
    max_abs_ay: float  # [g], post-enable window
    improvement_pct: float | None
    constraint_violations: int
    peak_excursion: float  # largest true-state exceedance of the bounds [rad]
    peak_abs_x1: float
    peak_abs_x2: float
    peak_abs_x2_hat: float
    peak_slack: float
    saturation_oscillations: int
    bound_hits: int
    peak_path_error: float | None
    unstable: bool


@dataclass
class RunResult:
    records: list[TelemetryRecord]
    summary: RunSummary
    u_bound: float = 0.0
    path_errors: list[float] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(rec, name) for rec in self.records])


def _model(A: np.ndarray, B: np.ndarray, C: np.ndarray, v_x: float, L: float,
           delta_f: float, delta_f_dot: float, T_s: float) -> CtrlModel:
    E = np.array([-delta_f_dot, -v_x / L * delta_f])
    D = np.array([v_x / L * delta_f, 0.0])
    return discretize(CtrlModel(A_c=A, B_c=B, E_c=E, C_c=C, D_c=D), T_s)


def build_plant(cfg: RunConfig) -> Plant:
    p, pc, mu = cfg.vehicle, cfg.plant, cfg.scenario.mu
    front = TireCurve.for_road(p.C_f, pc.alpha_p_front, mu, pc.post_ratio)
    rear = TireCurve.for_road(p.C_r, pc.alpha_p_rear, mu, pc.post_ratio)
    return Plant(p, front, rear)


def run_scenario(cfg: RunConfig) -> RunResult:
    """Deterministic closed-loop run of ``cfg.scenario``.

    The controller runs every ``T_s``; the plant is sub-stepped at
    ``cfg.plant.dt`` with the driver input and yaw moment held. A plant fault
    truncates the run and marks the summary unstable.
    """
    sc: Scenario = cfg.scenario
    p = cfg.vehicle
    T_s = p.T_s
    plant = build_plant(cfg)
    n_sub = max(1, int(round(T_s / cfg.plant.dt)))
    dt_plant = T_s / n_sub
    n_steps = int(round(sc.duration / T_s))
    rng = np.random.default_rng(sc.seed)

    T_max = max_motor_torque(cfg.motor, sc.v_x, p.r_w)
    u_bounds = allocation.yaw_moment_bounds(T_max, p, cfg.control.two_wheel_bound)
    A, B, C = state_matrices(p, sc.v_x)
    sliding = dataclasses.replace(cfg.sliding, zeta=cfg.mpc.zeta)

    state = PlantState(v_x=sc.v_x)
    steer_filter = SteerRateFilter(dt=T_s, tau=cfg.driver.steer_rate_tau)
    gain = observer.design_gain(_model(A, B, C, sc.v_x, p.L, 0.0, 0.0, T_s), cfg.observer.poles)
    obs = observer.ObserverState(l_gain=gain)
    prev: tuple[CtrlModel, float, np.ndarray, float] | None = None
    u_prev = 0.0
    warm = None
    delta_cmd = 0.0
    records: list[TelemetryRecord] = []
    path_errors: list[float] = []
    unstable = False

    for k in range(n_steps):
        t = k * T_s
        if sc.driver == "path-follower":
            drv = path_follower_steer(
                state, sc.path, cfg.driver.preview_time, k_p=cfg.driver.k_p,
                delta_prev=delta_cmd, dt=T_s, rate_limit=cfg.driver.rate_limit,
                max_steer=cfg.driver.max_steer)
            delta_cmd = drv.delta_f
            path_errors.append(sc.path.lateral(state.X) - state.Y)
        else:
            delta_cmd = sc.steer(t)
        delta_dot = steer_filter.update(delta_cmd)
        u_drv = DriverInput(delta_f=delta_cmd, delta_f_dot=delta_dot)

        # sensors
        r_meas = state.r
        a_y = plant.lateral_acceleration(state, u_drv)
        a_y_meas = a_y
        if sc.sensor_noise > 0:
            r_meas += sc.sensor_noise * rng.standard_normal()
            a_y_meas += sc.sensor_noise * p.g * rng.standard_normal()
        y_meas = np.array([r_meas, a_y_meas])
        x1 = measure_x1(r_meas, delta_cmd, sc.v_x, p)
        model = _model(A, B, C, sc.v_x, p.L, delta_cmd, delta_dot, T_s)

        flags = 0
        if prev is not None:
            m_prev, u_last, y_last, x1_last = prev
            obs = observer.update(obs, m_prev, u_last, y_last, T_s,
                                  x1_last if cfg.observer.hybrid else None)
            if obs.fault:
                flags |= FLAG_OBSERVER_FAULT
        else:
            obs = observer.substitute_x1(obs, x1)
        if cfg.observer.hybrid:
            obs = observer.substitute_x1(obs, x1)
        x2_hat = float(obs.x_hat[1])

        active = (sc.controller != "none" and t >= sc.control_enable_time
                  and abs(delta_cmd) >= cfg.control.steer_threshold)
        M_cmd, slack, iters = 0.0, 0.0, 0
        if active:
            flags |= FLAG_ACTIVE
            if sc.controller == "mpc":
                res = mpc.control_step(x1, x2_hat, model, cfg.mpc, u_prev, u_bounds, warm)
                M_cmd, slack, iters = res.M_z, res.slack, res.iterations
                warm = None if res.fault else mpc.shifted(res.sequence)
                if res.fault:
                    flags |= FLAG_SOLVER_FAULT
                if res.degraded:
                    flags |= FLAG_DEGRADED
            else:
                s = baseline.sliding_surface(x1, sliding.zeta)
                M_cmd = baseline.control_law(s, x1, delta_dot, x1 + x2_hat, x2_hat,
                                             p, sc.v_x, sliding, u_bounds)
        else:
            warm = None

        cmd = allocation.allocate(M_cmd, T_max, p)
        if cmd.shortfall != 0.0:
            flags |= FLAG_SHORTFALL
        M_applied = allocation.yaw_moment(cmd, p)
        if abs(M_cmd) >= u_bounds[1] * (1.0 - 1e-9) and active:
            flags |= FLAG_AT_BOUND

        alpha_f, alpha_r = wheel_sideslips(state, u_drv, p)
        records.append(TelemetryRecord(
            t=t, delta_f=delta_cmd, v_x=state.v_x, beta=state.beta, r=state.r, a_y=a_y,
            alpha_f=alpha_f, alpha_r=alpha_r, x1=x1, x2_hat=x2_hat, M_z=M_cmd,
            T_rl=cmd.T_rl, T_rr=cmd.T_rr, slack=slack, solver_iters=iters, flags=flags))

        prev = (model, M_cmd, y_meas, x1)
        u_prev = M_cmd
        try:
            for _ in range(n_sub):
                state = plant.step(state, u_drv, M_applied, dt_plant)
        except SimulationFault as exc:
            log.warning("%s/%s: %s at t=%.3f", sc.name, sc.controller, exc, t)
            records[-1].flags |= FLAG_UNSTABLE
            unstable = True
            break

    if sc.driver == "path-follower":
        path_errors.append(sc.path.lateral(state.X) - state.Y)
    summary = summarize(records, cfg, u_bounds[1], unstable, path_errors)
    return RunResult(records=records, summary=summary, u_bound=u_bounds[1],
                     path_errors=path_errors)


def saturation_oscillations(M_z: np.ndarray, t: np.ndarray, bound: float,
                            window: float = 0.5, depth: float = 0.5) -> int:
    """Count bound-touching sign reversals of the yaw moment.

    Samples with ``|M_z| >= depth * bound`` are grouped into same-sign runs.
    Two consecutive runs of opposite sign form an event when the gap between
    them is at most ``window`` s and at least one of them touches the bound.
    """
    if bound <= 0 or M_z.size == 0:
        return 0
    contact = bound * (1.0 - 1e-9)
    runs: list[list] = []  # [sign, t_first, t_last, touched]
    for Mk, tk in zip(M_z, t):
        if abs(Mk) < depth * bound:
            continue
        sk = math.copysign(1.0, Mk)
        hit = abs(Mk) >= contact
        if runs and runs[-1][0] == sk:
            runs[-1][2] = tk
            runs[-1][3] = runs[-1][3] or hit
        else:
            runs.append([sk, tk, tk, hit])
    return sum(1 for a, b in zip(runs, runs[1:])
               if b[1] - a[2] <= window and (a[3] or b[3]))


def state_excursions(x1: np.ndarray, alpha_r: np.ndarray, cfg: RunConfig) -> tuple[int, float]:
    """Samples outside the mirrored state bounds, and the largest exceedance [rad]."""
    m = cfg.mpc
    count, peak = 0, 0.0
    for a, b in zip(x1, alpha_r):
        _, lo, hi = mpc.mirrored_targets(m, mpc.turn_sign(a))
        x = np.array([a, b])
        over = float(np.max(np.maximum(np.maximum(x - hi, lo - x), 0.0)))
        if over > 0.0:
            count += 1
            peak = max(peak, over)
    return count, peak


def summarize(records: list[TelemetryRecord], cfg: RunConfig, u_bound: float,
              unstable: bool, path_errors: list[float] | None = None) -> RunSummary:
    sc = cfg.scenario
    g = cfg.vehicle.g
    t = np.array([r.t for r in records])
    post = t >= sc.control_enable_time
    if not post.any():
        post = np.ones_like(t, dtype=bool)

    def col(name):
        return np.array([getattr(r, name) for r in records])[post]

    M_all = np.array([r.M_z for r in records])
    violations, excursion = state_excursions(col("x1"), col("alpha_r"), cfg)
    return RunSummary(
        scenario=sc.name,
        controller=sc.controller,
        mu=sc.mu,
        max_abs_ay=float(np.max(np.abs(col("a_y")), initial=0.0) / g),
        improvement_pct=None,
        constraint_violations=violations,
        peak_excursion=excursion,
        peak_abs_x1=float(np.max(np.abs(col("x1")), initial=0.0)),
        peak_abs_x2=float(np.max(np.abs(col("alpha_r")), initial=0.0)),
        peak_abs_x2_hat=float(np.max(np.abs(col("x2_hat")), initial=0.0)),
        peak_slack=float(np.max(col("slack"), initial=0.0)),
        saturation_oscillations=saturation_oscillations(
            M_all, t, u_bound, cfg.control.oscillation_window,
            cfg.control.oscillation_depth),
        bound_hits=int(np.sum(np.abs(M_all) >= u_bound * (1.0 - 1e-9))) if u_bound > 0 else 0,
        peak_path_error=float(np.max(np.abs(path_errors))) if path_errors else None,
        unstable=unstable,
    )


def improvement_pct(baseline_run: RunSummary, controlled: RunSummary) -> float:
    return 100.0 * (controlled.max_abs_ay - baseline_run.max_abs_ay) / baseline_run.max_abs_ay


def with_controller(cfg: RunConfig, controller: str) -> RunConfig:
    return dataclasses.replace(cfg, scenario=dataclasses.replace(cfg.scenario, controller=controller))


@dataclass
class Comparison:
    runs: dict[str, RunResult]

    @property
    def summaries(self) -> dict[str, RunSummary]:
        return {name: run.summary for name, run in self.runs.items()}


def compare_controllers(cfg: RunConfig, controllers=("none", "mpc", "conventional")) -> Comparison:
    """Paired runs sharing every setting but the controller.

    Controlled summaries get ``improvement_pct`` relative to the uncontrolled run.
    """
    runs = {c: run_scenario(with_controller(cfg, c)) for c in controllers}
    if "none" in runs:
        base = runs["none"].summary
        for name, run in runs.items():
            if name != "none":
                run.summary.improvement_pct = improvement_pct(base, run.summary)
    return Comparison(runs)


__all__ = [
    "TELEMETRY_FIELDS", "TelemetryRecord", "RunSummary", "RunResult", "Comparison",
    "run_scenario", "compare_controllers", "summarize", "saturation_oscillations", "state_excursions",
    "improvement_pct", "with_controller", "build_plant",
]
