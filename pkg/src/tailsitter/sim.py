"""Fixed-step closed-loop simulation, logging and Lyapunov monitoring."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .controller import ControlInput, Controller
from .model import NonFiniteError, VehicleState, dynamics_rhs, forces, wrap_angle
from .trajectory import ReferenceSample

FLAG_THRUST_CLAMPED = 1
FLAG_LYAPUNOV_VIOLATION = 2

INTEGRATORS = ("rk4", "euler")


class SimulationAbort(RuntimeError):
    """The integration produced a non-finite state; ``records`` holds the good prefix."""

    def __init__(self, message, records=()):
        super().__init__(message)
        self.records = list(records)


def rk4_step(f: Callable[[Sequence[float]], Sequence[float]], x: Sequence[float], dt: float) -> tuple[float, ...]:
    k1 = f(x)
    k2 = f([xi + 0.5 * dt * ki for xi, ki in zip(x, k1)])
    k3 = f([xi + 0.5 * dt * ki for xi, ki in zip(x, k2)])
    k4 = f([xi + dt * ki for xi, ki in zip(x, k3)])
    return tuple(xi + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
                 for xi, a, b, c, d in zip(x, k1, k2, k3, k4))


def euler_step(f, x, dt):
    return tuple(xi + dt * ki for xi, ki in zip(x, f(x)))


def integrate(f, x0, dt: float, n_steps: int, method: str = "rk4") -> tuple[float, ...]:
    """Advance an autonomous ODE ``n_steps`` fixed steps."""
    stepper = _stepper(method)
    x = tuple(x0)
    for _ in range(n_steps):
        x = stepper(f, x, dt)
    return x


def _stepper(method):
    try:
        return {"rk4": rk4_step, "euler": euler_step}[method]
    except KeyError:
        raise ValueError(f"unknown integrator {method!r}; choose from {INTEGRATORS}") from None


def step(state: VehicleState, control: ControlInput, aero, params, dt: float, method: str = "rk4") -> VehicleState:
    """One integration step with the control held constant (zero-order hold)."""
    if not state.is_finite():
        raise NonFiniteError(f"non-finite state {state}")

    def f(x):
        return dynamics_rhs(VehicleState(*x), control, aero, params)

    u, w, th, q = _stepper(method)(f, state.as_tuple(), dt)
    nxt = VehicleState(u, w, wrap_angle(th), q)
    if not nxt.is_finite():
        raise NonFiniteError(f"integration produced non-finite state {nxt}")
    return nxt


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_end: float = 60.0
    integrator: str = "rk4"
    initial: VehicleState = VehicleState(0.0, 0.0, math.pi / 2, 0.0)
    attitude_threshold: float = math.radians(5.0)  # monitor gate on |theta - theta_d|
    transient_band: float = math.radians(5.0)  # attitude transient ends once inside this band for good

    def __post_init__(self):
        if not 0 < self.dt <= 0.01:
            raise ValueError(f"dt must lie in (0, 0.01], got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}, got {self.integrator!r}")
        if not 0.0 <= self.initial.theta <= math.pi:
            raise ValueError(f"initial theta must lie in [0, pi], got {self.initial.theta}")
        if not self.initial.is_finite():
            raise ValueError("initial state must be finite")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(slots=True)
class SimRecord:
    t: float
    u: float
    w: float
    theta: float
    q: float
    u_d: float
    w_d: float
    alpha_d: float
    theta_d: float
    q_d: float
    T: float
    tau: float
    T1: float
    T2: float
    eps: float
    L: float
    D: float
    alpha: float
    V: float
    V_lyap: float
    flags: int = 0
    # both outer saturations in their linear band at this sample
    linear: bool = True

    @property
    def attitude_error(self) -> float:
        return abs(self.theta - self.theta_d)


@dataclass(frozen=True)
class MonitorReport:
    count: int
    times: tuple[float, ...]
    checked: int


def lyapunov_monitor(records: Sequence[SimRecord], attitude_threshold: float = math.radians(5.0),
                     rel_tol: float = 1e-6, mark: bool = False) -> MonitorReport:
    """Flag consecutive samples where ``V_lyap`` grows while the loop is in its nominal regime.

    A pair is checked when both samples have ``|theta - theta_d|`` below
    ``attitude_threshold`` and the outer saturations in their linear band. It
    is a violation when ``V[k+1] > V[k] + rel_tol * (1 + V[k])``.
    """
    if not records:
        raise ValueError("lyapunov_monitor needs at least one record")
    times = []
    checked = 0
    for a, b in zip(records, records[1:]):
        if not (a.linear and b.linear and a.attitude_error < attitude_threshold
                and b.attitude_error < attitude_threshold):
            continue
        checked += 1
        if b.V_lyap > a.V_lyap + rel_tol * (1.0 + a.V_lyap):
            times.append(b.t)
            if mark:
                b.flags |= FLAG_LYAPUNOV_VIOLATION
    return MonitorReport(len(times), tuple(times), checked)


def transient_end(records: Sequence[SimRecord], band: float = math.radians(5.0)) -> float | None:
    """Time from which ``|theta - theta_d| < band`` holds to the end, or None."""
    t_in = None
    for r in reversed(records):
        if r.attitude_error >= band:
            break
        t_in = r.t
    return t_in


def settling_time(times: Sequence[float], errors: Sequence[float], band: float) -> float | None:
    """Last time ``|error|`` exceeded ``band`` (0 if never; None if it ends outside)."""
    if errors and abs(errors[-1]) > band:
        return None
    for t, e in zip(reversed(times), reversed(errors)):
        if abs(e) > band:
            return t
    return 0.0


@dataclass(frozen=True)
class RunSummary:
    n_records: int
    t_final: float
    final_u_error: float
    final_w_error: float
    final_theta_error: float
    final_theta: float
    final_alpha: float
    final_speed: float
    final_T: float
    settling_u: float | None
    settling_w: float | None
    settling_theta: float | None
    max_abs_eps: float
    min_T: float
    max_T: float
    max_dT_rate: float
    max_dtau_rate: float
    monitor_violations: int
    violations_after_transient: int
    transient_end: float | None
    thrust_clamp_events: int

    def lines(self) -> list[str]:
        def fmt(v):
            if v is None:
                return "none"
            if isinstance(v, float):
                return repr(v)
            return str(v)
        return [f"{name} = {fmt(getattr(self, name))}" for name in self.__dataclass_fields__]


def summarize(records: Sequence[SimRecord], initial: VehicleState | None = None,
              reference: Callable[[float], ReferenceSample] | None = None,
              attitude_threshold: float = math.radians(5.0),
              transient_band: float = math.radians(5.0)) -> RunSummary:
    if not records:
        ref = reference(0.0) if reference is not None else ReferenceSample.zero()
        s = initial or VehicleState(0.0, 0.0, 0.0, 0.0)
        alpha = math.atan2(s.w, s.u) if (s.u or s.w) else 0.0
        return RunSummary(0, 0.0, abs(s.u - ref.u_d), abs(s.w - ref.w_d), math.nan, s.theta, alpha,
                          max(abs(s.u), abs(s.w)), math.nan,
                          None, None, None, 0.0, math.nan, math.nan, 0.0, 0.0, 0, 0, None, 0)
    last = records[-1]
    times = [r.t for r in records]

    def settle(err, ref):
        scale = max((abs(x) for x in ref), default=0.0)
        return settling_time(times, err, 0.02 * scale) if scale > 0 else None

    report = lyapunov_monitor(records, attitude_threshold, mark=True)
    t_tr = transient_end(records, transient_band)
    after = sum(1 for t in report.times if t_tr is not None and t > t_tr)
    dT = dtau = 0.0
    for a, b in zip(records, records[1:]):
        h = b.t - a.t
        dT = max(dT, abs(b.T - a.T) / h)
        dtau = max(dtau, abs(b.tau - a.tau) / h)
    return RunSummary(
        n_records=len(records),
        t_final=last.t,
        final_u_error=abs(last.u - last.u_d),
        final_w_error=abs(last.w - last.w_d),
        final_theta_error=abs(last.theta - last.theta_d),
        final_theta=last.theta,
        final_alpha=last.alpha,
        final_speed=max(abs(last.u), abs(last.w)),
        final_T=last.T,
        settling_u=settle([r.u - r.u_d for r in records], [r.u_d for r in records]),
        settling_w=settle([r.w - r.w_d for r in records], [r.w_d for r in records]),
        settling_theta=settle([r.theta - r.theta_d for r in records], [r.theta_d for r in records]),
        max_abs_eps=max(abs(r.eps) for r in records),
        min_T=min(r.T for r in records),
        max_T=max(r.T for r in records),
        max_dT_rate=dT,
        max_dtau_rate=dtau,
        monitor_violations=report.count,
        violations_after_transient=after,
        transient_end=t_tr,
        thrust_clamp_events=sum(1 for r in records if r.flags & FLAG_THRUST_CLAMPED),
    )


def run(config: SimConfig, controller: Controller,
        reference: Callable[[float], ReferenceSample]) -> tuple[list[SimRecord], RunSummary]:
    """Sample, control, integrate for ``t`` in ``[0, t_end)``; one record per step."""
    aero, params, gains = controller.aero, controller.params, controller.gains
    controller.reset()
    state = config.initial
    dt = config.dt
    records: list[SimRecord] = []
    for k in range(config.n_steps):
        t = k * dt
        ref = reference(t)
        ci = controller(state, ref)
        fs = forces(state, aero, params, ci.T)
        x1, x2 = state.u - ref.u_d, state.w - ref.w_d
        linear = (gains.sigma1.is_linear(x2)
                  and gains.sigma2.is_linear(controller.last_eps_argument))
        records.append(SimRecord(
            t, state.u, state.w, state.theta, state.q,
            ref.u_d, ref.w_d, ref.alpha_d, ci.theta_d, ci.q_d,
            ci.T, ci.tau, ci.T1, ci.T2, ci.eps,
            fs.L, fs.D, fs.alpha, fs.V, 0.5 * (x1 * x1 + x2 * x2),
            FLAG_THRUST_CLAMPED if ci.thrust_clamped else 0, linear))
        try:
            state = step(state, ci, aero, params, dt, config.integrator)
        except NonFiniteError as exc:
            raise SimulationAbort(f"t={t:.6g}: {exc}", records) from exc
    summary = summarize(records, config.initial, reference, config.attitude_threshold, config.transient_band)
    return records, summary
