"""Planar tail-sitter transition simulator and saturated controller."""

from .aero import AeroModel, AnalyticPolar, PolarTable, aero_forces, coefficients, default_polar, optimal_aoa
from .controller import (AllocationConfig, ControlInput, Controller, ControllerGains, SaturationFn, allocate,
                         pitch_reference, rate_references, saturate, thrust_command, torque_command,
                         virtual_epsilon)
from .model import PhysicalParams, VehicleState, angle_of_attack, dynamics_rhs, f1_f2
from .sim import SimConfig, lyapunov_monitor, run, step
from .trajectory import RampSpec, ReferenceSample, TransitionDirection, TransitionProfile, arctan_ramp, reference_at

__version__ = "0.1.0"
