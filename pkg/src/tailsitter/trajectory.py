"""Smooth reference profiles for the hover/cruise transition.

Both the speed and the angle-of-attack references use the same ramp: identity
up to a linear limit ``L``, then an arctan blend that approaches ``M`` with
matching slope at the junction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class RampSpec:
    L: float
    M: float

    def __post_init__(self):
        if not (0 < self.L <= self.M) or not math.isfinite(self.M):
            raise ValueError(f"ramp needs 0 < L <= M, got L={self.L}, M={self.M}")

    @property
    def a(self) -> float:
        """Blend rate ``pi / (2 (M - L))``; infinite for the degenerate L == M."""
        if self.L == self.M:
            return math.inf
        return math.pi / (2.0 * (self.M - self.L))

    @property
    def is_c1(self) -> bool:
        return self.L < self.M


def arctan_ramp(spec: RampSpec, s: float) -> tuple[float, float]:
    """Ramp value and its derivative with respect to ``s``."""
    if s < 0:
        raise ValueError(f"ramp argument must be >= 0, got {s}")
    if s <= spec.L:
        return s, 1.0
    if spec.L == spec.M:
        return spec.M, 0.0
    a = spec.a
    x = a * (s - spec.L)
    return math.atan(x) / a + spec.L, 1.0 / (1.0 + x * x)


class TransitionDirection(enum.Enum):
    HOVER_TO_CRUISE = "hover_to_cruise"
    CRUISE_TO_HOVER = "cruise_to_hover"


@dataclass(frozen=True, slots=True)
class ReferenceSample:
    u_d: float
    u_d_dot: float
    alpha_d: float  # rad
    alpha_d_dot: float  # rad/s
    w_d: float
    w_d_dot: float

    @classmethod
    def zero(cls) -> ReferenceSample:
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class TransitionProfile:
    """Reference generator for one maneuver.

    ``alpha_spec`` is expressed in degrees with ``t`` in seconds (1 deg/s in
    the linear part); samples are returned in radians. ``u_spec`` is driven by
    ``t / u_time_scale``.
    """

    direction: TransitionDirection = TransitionDirection.HOVER_TO_CRUISE
    u_spec: RampSpec = RampSpec(0.7, 1.0)
    alpha_spec: RampSpec = RampSpec(4.0, 6.0)
    u_time_scale: float = 5.0
    mirror_duration: float = 30.0

    def __post_init__(self):
        if not self.u_time_scale > 0:
            raise ValueError(f"u_time_scale must be positive, got {self.u_time_scale}")
        if self.direction is TransitionDirection.CRUISE_TO_HOVER and not self.mirror_duration > 0:
            raise ValueError(f"mirror_duration must be positive, got {self.mirror_duration}")

    def __call__(self, t: float) -> ReferenceSample:
        return reference_at(t, self.direction, self.u_spec, self.alpha_spec,
                            u_time_scale=self.u_time_scale, mirror_duration=self.mirror_duration)


def _forward(tau: float, u_spec: RampSpec, alpha_spec: RampSpec, u_time_scale: float):
    u, du = arctan_ramp(u_spec, tau / u_time_scale)
    a_deg, da_deg = arctan_ramp(alpha_spec, tau)
    return u, du / u_time_scale, math.radians(a_deg), math.radians(da_deg)


def reference_at(t: float, direction: TransitionDirection, u_spec: RampSpec, alpha_spec: RampSpec,
                 u_time_scale: float = 5.0, mirror_duration: float = 30.0) -> ReferenceSample:
    if t < 0:
        raise ValueError(f"reference time must be >= 0, got {t}")
    if direction is TransitionDirection.HOVER_TO_CRUISE:
        u, du, al, dal = _forward(t, u_spec, alpha_spec, u_time_scale)
    else:
        tau = mirror_duration - t
        if tau <= 0:
            return ReferenceSample.zero()
        u, du, al, dal = _forward(tau, u_spec, alpha_spec, u_time_scale)
        du, dal = -du, -dal
    tan_a = math.tan(al)
    w = u * tan_a
    w_dot = du * tan_a + u * (1.0 + tan_a * tan_a) * dal
    return ReferenceSample(u, du, al, dal, w, w_dot)
