"""Planar longitudinal dynamics of a tail-sitter.

State is ``(u, w, theta, q)``: body-x and body-z velocity, pitch angle and
pitch rate. Forces and torque are normalized by mass and inertia, so every
term of the rate equations is an acceleration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .aero import AeroModel


class NonFiniteError(ArithmeticError):
    """Raised when a NaN/Inf enters or leaves the dynamics."""


def wrap_angle(angle: float) -> float:
    """Wrap ``angle`` into [-pi, pi]."""
    if -math.pi <= angle <= math.pi:
        return angle
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True, slots=True)
class VehicleState:
    u: float  # m/s
    w: float  # m/s
    theta: float  # rad
    q: float  # rad/s

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.u, self.w, self.theta, self.q)

    def is_finite(self) -> bool:
        isf = math.isfinite
        return isf(self.u) and isf(self.w) and isf(self.theta) and isf(self.q)

    @property
    def airspeed(self) -> float:
        return math.hypot(self.u, self.w)


@dataclass(frozen=True, slots=True)
class PhysicalParams:
    g: float = 9.81
    # aerodynamic forces vanish and alpha := 0 below this airspeed
    airspeed_floor: float = 0.01

    def __post_init__(self):
        if not (self.g > 0 and math.isfinite(self.g)):
            raise ValueError(f"g must be positive, got {self.g}")
        if not (self.airspeed_floor >= 0):
            raise ValueError(f"airspeed_floor must be >= 0, got {self.airspeed_floor}")


@dataclass(frozen=True, slots=True)
class ForceSet:
    L: float
    D: float
    T: float
    alpha: float
    V: float


def angle_of_attack(state: VehicleState, params: PhysicalParams = PhysicalParams()) -> float:
    """Return ``atan2(w, u)``, or 0 when airspeed is below the floor."""
    if math.hypot(state.u, state.w) < params.airspeed_floor:
        return 0.0
    return math.atan2(state.w, state.u)


def _lift_drag(state, aero, params) -> tuple[float, float, float, float]:
    V = math.hypot(state.u, state.w)
    if V < params.airspeed_floor:
        return 0.0, 0.0, 0.0, V
    alpha = math.atan2(state.w, state.u)
    L, D = aero.forces(V, alpha)
    return L, D, alpha, V


def forces(state: VehicleState, aero: AeroModel, params: PhysicalParams = PhysicalParams(),
           T: float = 0.0) -> ForceSet:
    L, D, alpha, V = _lift_drag(state, aero, params)
    return ForceSet(L=L, D=D, T=T, alpha=alpha, V=V)


def f1_f2(state: VehicleState, aero: AeroModel,
          params: PhysicalParams = PhysicalParams()) -> tuple[float, float]:
    """Aerodynamic plus Coriolis parts of the translational rates.

    With ``eps = cos(theta)`` and ``sin(theta) >= 0``::

        u_dot = f1 + T - g * sqrt(1 - eps**2)
        w_dot = f2 + g * eps
    """
    L, D, alpha, _ = _lift_drag(state, aero, params)
    ca, sa = math.cos(alpha), math.sin(alpha)
    f1 = -D * ca + L * sa - state.q * state.w
    f2 = -D * sa - L * ca + state.q * state.u
    return f1, f2


def dynamics_rhs(state: VehicleState, input, aero: AeroModel,
                 params: PhysicalParams = PhysicalParams()) -> tuple[float, float, float, float]:
    """Time derivative ``(u_dot, w_dot, theta_dot, q_dot)``.

    ``input`` is anything with ``T`` and ``tau`` attributes (normally a
    :class:`tailsitter.controller.ControlInput`).
    """
    T, tau = input.T, input.tau
    if not (math.isfinite(T) and math.isfinite(tau)):
        raise NonFiniteError(f"non-finite control input T={T!r}, tau={tau!r}")
    if not state.is_finite():
        raise NonFiniteError(f"non-finite state {state}")
    f1, f2 = f1_f2(state, aero, params)
    g = params.g
    u_dot = f1 + T - g * math.sin(state.theta)
    w_dot = f2 + g * math.cos(state.theta)
    return u_dot, w_dot, state.q, tau
