"""Saturated transition controller.

Outer loop: the virtual control ``eps = cos(theta_d)`` and the thrust ``T``
steer the body velocities. Inner loop: a PD torque law with feedforward tracks
``theta_d``. Rate references come from a causal filtered differentiator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .aero import AeroModel
from .model import PhysicalParams, VehicleState, f1_f2
from .trajectory import ReferenceSample


@dataclass(frozen=True, slots=True)
class SaturationFn:
    """Odd, non-decreasing, identity on ``[-L, L]``, bounded by ``M``.

    Outside the linear band the tail is ``arctan(a (|s| - L)) / a + L`` with
    ``a = pi / (2 (M - L))``, which is C1 at the junction.
    """

    L: float
    M: float

    def __post_init__(self):
        if not (0 < self.L <= self.M) or not math.isfinite(self.M):
            raise ValueError(f"saturation needs 0 < L_s <= M_s, got L_s={self.L}, M_s={self.M}")

    def __call__(self, s: float) -> float:
        return saturate(self, s)

    def is_linear(self, s: float) -> bool:
        return abs(s) <= self.L


def saturate(fn: SaturationFn, s: float) -> float:
    m = abs(s)
    if m <= fn.L:
        return s
    if fn.L == fn.M:
        return math.copysign(fn.M, s)
    a = math.pi / (2.0 * (fn.M - fn.L))
    return math.copysign(math.atan(a * (m - fn.L)) / a + fn.L, s)


@dataclass(frozen=True)
class ControllerGains:
    k_theta: float = 5.0
    k_q: float = 3.0
    sigma1: SaturationFn = SaturationFn(0.9, 1.0)
    sigma2: SaturationFn = SaturationFn(0.9, 1.0)
    sigma3: SaturationFn = SaturationFn(0.9, 1.0)
    tau_f: float = 0.05
    # Divide the sigma2 argument by g so that g * eps cancels f2 exactly.
    gravity_normalized: bool = True

    def __post_init__(self):
        if not (self.k_theta > 0 and self.k_q > 0):
            raise ValueError(f"k_theta and k_q must be positive, got {self.k_theta}, {self.k_q}")
        if self.sigma2.M > 1:
            raise ValueError(f"sigma2 bound M_s must be <= 1 (eps is a cosine), got {self.sigma2.M}")
        if not self.tau_f > 0:
            raise ValueError(f"tau_f must be positive, got {self.tau_f}")


@dataclass(frozen=True)
class AllocationConfig:
    beta: float = 1.0  # share of torque produced by differential thrust
    d_max: float = math.inf

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if not self.d_max >= 0:
            raise ValueError(f"d_max must be >= 0, got {self.d_max}")


@dataclass(frozen=True, slots=True)
class ControlInput:
    T: float
    tau: float
    T1: float = 0.0
    T2: float = 0.0
    aileron_share: float = 0.0
    theta_d: float = 0.0
    q_d: float = 0.0
    q_d_dot: float = 0.0
    eps: float = 0.0
    thrust_clamped: bool = False


def _eps_argument(f2, state, ref, gains, params):
    arg = f2 + gains.sigma1(state.w - ref.w_d) - ref.w_d_dot
    if gains.gravity_normalized:
        arg /= params.g
    return arg


def _thrust(f1, state, ref, eps, gains, params):
    return (-gains.sigma3(state.u - ref.u_d) + params.g * math.sqrt(max(0.0, 1.0 - eps * eps))
            - f1 + ref.u_d_dot)


def epsilon_argument(state: VehicleState, ref: ReferenceSample, aero: AeroModel, gains: ControllerGains,
                     params: PhysicalParams = PhysicalParams()) -> float:
    """The quantity fed to ``sigma2`` when forming ``eps``."""
    _, f2 = f1_f2(state, aero, params)
    return _eps_argument(f2, state, ref, gains, params)


def virtual_epsilon(state: VehicleState, ref: ReferenceSample, aero: AeroModel, gains: ControllerGains,
                    params: PhysicalParams = PhysicalParams()) -> float:
    """``eps = -sigma2(f2 + sigma1(w - w_d) - w_d_dot)``, optionally g-normalized."""
    return -gains.sigma2(epsilon_argument(state, ref, aero, gains, params))


def pitch_reference(eps: float) -> float:
    """``theta_d = arccos(eps)`` in [0, pi]."""
    if abs(eps) > 1.0 + 1e-12:
        raise AssertionError(f"virtual control out of range: |eps|={abs(eps)!r} > 1")
    return math.acos(max(-1.0, min(1.0, eps)))


class RateFilter:
    """Two cascaded first-order differentiating stages.

    ``q_d`` estimates d(theta_d)/dt and ``q_d_dot`` estimates d(q_d)/dt, each
    through ``s / (tau_f s + 1)`` discretized with forward Euler. Both outputs
    are zero on the first sample.
    """

    def __init__(self, tau_f: float, dt: float):
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt}")
        if tau_f < dt:
            raise ValueError(f"tau_f ({tau_f}) must be >= dt ({dt})")
        self.tau_f = tau_f
        self.dt = dt
        self.reset()

    def reset(self):
        self._lag1 = None
        self._lag2 = 0.0

    def update(self, theta_d: float) -> tuple[float, float]:
        if self._lag1 is None:
            self._lag1 = theta_d
        k = self.dt / self.tau_f
        q_d = (theta_d - self._lag1) / self.tau_f
        q_d_dot = (q_d - self._lag2) / self.tau_f
        self._lag1 += k * (theta_d - self._lag1)
        self._lag2 += k * (q_d - self._lag2)
        return q_d, q_d_dot


def rate_references(theta_d_stream, tau_f: float, dt: float) -> list[tuple[float, float]]:
    """Run a fresh :class:`RateFilter` over a sequence of ``theta_d`` samples."""
    filt = RateFilter(tau_f, dt)
    return [filt.update(th) for th in theta_d_stream]


def thrust_command(state: VehicleState, ref: ReferenceSample, eps: float, aero: AeroModel,
                   gains: ControllerGains = ControllerGains(),
                   params: PhysicalParams = PhysicalParams()) -> float:
    """``T = -sigma3(u - u_d) + g sqrt(1 - eps^2) - f1 + u_d_dot`` (not clamped)."""
    if abs(eps) > 1.0 + 1e-12:
        raise AssertionError(f"virtual control out of range: |eps|={abs(eps)!r} > 1")
    f1, _ = f1_f2(state, aero, params)
    return _thrust(f1, state, ref, eps, gains, params)


def torque_command(state: VehicleState, theta_d: float, q_d: float, q_d_dot: float,
                   gains: ControllerGains = ControllerGains()) -> float:
    return -gains.k_theta * (state.theta - theta_d) - gains.k_q * (state.q - q_d) + q_d_dot


def allocate(T: float, tau: float, config: AllocationConfig = AllocationConfig()) -> tuple[float, float, float]:
    """Split into motor thrusts ``(T1, T2)`` and the torque left to the ailerons.

    ``T1 - T2`` carries ``clamp(beta * tau, -d_max, d_max)``; the aileron share
    is only reported, never simulated.
    """
    d = max(-config.d_max, min(config.d_max, config.beta * tau))
    half = 0.5 * T
    T1 = half + 0.5 * d
    T2 = T - T1
    return T1, T2, tau - d


@dataclass
class Controller:
    """Stateful closed-loop controller; owns its rate filter."""

    aero: AeroModel
    gains: ControllerGains = field(default_factory=ControllerGains)
    params: PhysicalParams = field(default_factory=PhysicalParams)
    allocation: AllocationConfig = field(default_factory=AllocationConfig)
    dt: float = 1e-3
    clamp_thrust: bool = False

    def __post_init__(self):
        self.filter = RateFilter(self.gains.tau_f, self.dt)
        self.last_eps_argument = 0.0

    def reset(self):
        self.filter.reset()
        self.last_eps_argument = 0.0

    def __call__(self, state: VehicleState, ref: ReferenceSample) -> ControlInput:
        gains, params = self.gains, self.params
        f1, f2 = f1_f2(state, self.aero, params)
        arg = _eps_argument(f2, state, ref, gains, params)
        self.last_eps_argument = arg
        eps = -gains.sigma2(arg)
        theta_d = pitch_reference(eps)
        q_d, q_d_dot = self.filter.update(theta_d)
        T = _thrust(f1, state, ref, eps, gains, params)
        clamped = False
        if self.clamp_thrust and T < 0.0:
            T, clamped = 0.0, True
        tau = torque_command(state, theta_d, q_d, q_d_dot, self.gains)
        T1, T2, share = allocate(T, tau, self.allocation)
        return ControlInput(T, tau, T1, T2, share, theta_d, q_d, q_d_dot, eps, clamped)
