import math

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from tailsitter.aero import AeroModel, default_polar
from tailsitter.controller import (AllocationConfig, Controller, ControllerGains, RateFilter, SaturationFn,
                                   allocate, pitch_reference, rate_references, saturate, thrust_command,
                                   torque_command, virtual_epsilon)
from tailsitter.model import VehicleState
from tailsitter.trajectory import ReferenceSample

G = 9.81
SIG = SaturationFn(0.9, 1.0)
LITERAL = ControllerGains(gravity_normalized=False)
HOVER = VehicleState(0.0, 0.0, math.pi / 2, 0.0)
ZERO_REF = ReferenceSample.zero()


def test_saturate_linear():
    assert saturate(SIG, 0.5) == 0.5
    assert saturate(SIG, -0.3) == -0.3


def test_saturate_tail_against_mpmath():
    mpmath.mp.dps = 40
    a = mpmath.pi / (2 * mpmath.mpf("0.1"))
    expected = float(mpmath.atan(a * mpmath.mpf("1.1")) / a + mpmath.mpf("0.9"))
    got = saturate(SIG, 2.0)
    assert got == pytest.approx(expected, abs=1e-15)
    assert got == pytest.approx(0.9963, abs=1e-4)
    assert got < 1.0
    assert saturate(SIG, -2.0) == -got


def test_hard_clip_when_L_equals_M():
    fn = SaturationFn(1.0, 1.0)
    assert fn(3.0) == 1.0 and fn(-0.5) == -0.5


@pytest.mark.parametrize("L, M", [(0.0, 1.0), (1.1, 1.0), (0.5, math.inf)])
def test_saturation_rejects(L, M):
    with pytest.raises(ValueError):
        SaturationFn(L, M)


@given(L=st.floats(1e-3, 10), gap=st.floats(0, 10), s=st.floats(-1e6, 1e6))
def test_saturation_axioms(L, gap, s):
    fn = SaturationFn(L, L + gap)
    v = fn(s)
    if s != 0:
        assert math.copysign(1, v) == math.copysign(1, s) and v != 0
    assert abs(v) <= fn.M
    if abs(s) <= L:
        assert v == s
    assert fn(-s) == -v


@given(L=st.floats(1e-3, 5), gap=st.floats(1e-3, 5), s=st.floats(-100, 100), ds=st.floats(0, 10))
def test_saturation_non_decreasing(L, gap, s, ds):
    fn = SaturationFn(L, L + gap)
    assert fn(s + ds) >= fn(s)


def test_epsilon_at_hover_is_zero(no_aero):
    assert virtual_epsilon(HOVER, ZERO_REF, no_aero, LITERAL) == 0.0
    assert virtual_epsilon(HOVER, ZERO_REF, no_aero, ControllerGains()) == 0.0
    assert math.degrees(pitch_reference(0.0)) == pytest.approx(90.0)


def test_epsilon_literal_linear_regions(no_aero):
    s = VehicleState(0.0, 0.5, math.pi / 2, 0.0)
    assert virtual_epsilon(s, ZERO_REF, no_aero, LITERAL) == -0.5


def test_epsilon_gravity_normalized(no_aero):
    s = VehicleState(0.0, 0.5, math.pi / 2, 0.0)
    assert virtual_epsilon(s, ZERO_REF, no_aero, ControllerGains()) == pytest.approx(-0.5 / G)


def test_epsilon_deep_saturation(no_aero):
    ref = ReferenceSample(0, 0, 0, 0, 0, -100.0)
    eps = virtual_epsilon(HOVER, ref, no_aero, LITERAL)
    assert abs(eps) < 1.0


@given(u=st.floats(-5, 5), w=st.floats(-5, 5), th=st.floats(-3, 3), q=st.floats(-10, 10),
       w_d=st.floats(-2, 2), w_d_dot=st.floats(-50, 50), norm=st.booleans())
def test_epsilon_bounded(u, w, th, q, w_d, w_d_dot, norm):
    aero = AeroModel.from_K(13.0, default_polar())
    ref = ReferenceSample(0, 0, 0, 0, w_d, w_d_dot)
    eps = virtual_epsilon(VehicleState(u, w, th, q), ref, aero, ControllerGains(gravity_normalized=norm))
    assert abs(eps) <= 1.0


@pytest.mark.parametrize("eps, deg", [(0.0, 90.0), (1.0, 0.0), (math.cos(math.radians(6)), 6.0), (-1.0, 180.0)])
def test_pitch_reference(eps, deg):
    assert math.degrees(pitch_reference(eps)) == pytest.approx(deg, abs=1e-9)


def test_pitch_reference_rejects_out_of_range():
    with pytest.raises(AssertionError):
        pitch_reference(1.001)


def test_rate_filter_constant_input():
    out = rate_references([0.7] * 400, tau_f=0.05, dt=1e-3)
    assert out[0] == (0.0, 0.0)
    assert all(q == 0.0 and qd == 0.0 for q, qd in out)


def test_rate_filter_step_settles():
    out = rate_references([0.0] + [0.2] * 600, tau_f=0.05, dt=1e-3)
    q, qd = out[int(5 * 0.05 / 1e-3) + 1]
    q_end, qd_end = out[-1]
    assert abs(q) < 0.2 / 0.05 * math.exp(-4)
    assert abs(q_end) < 1e-3 and abs(qd_end) < 1e-2


def test_rate_filter_ramp_tracks_slope():
    r, tau_f, dt = 0.3, 0.05, 1e-3
    n = int(10 * tau_f / dt) + 1
    out = rate_references([r * k * dt for k in range(n)], tau_f, dt)
    # first stage obeys e[k+1] = (1 - dt/tau_f) e[k] + r dt with e[0] = 0
    k = n - 1
    expected = r * (1 - (1 - dt / tau_f) ** k)
    assert out[-1][0] == pytest.approx(expected, rel=1e-9)
    assert abs(out[-1][0] - r) < 0.01 * r


def test_rate_filter_single_sample():
    assert rate_references([1.234], 0.05, 1e-3) == [(0.0, 0.0)]


def test_rate_filter_rejects_small_time_constant():
    with pytest.raises(ValueError):
        RateFilter(tau_f=1e-4, dt=1e-3)


def test_thrust_hover(no_aero):
    assert thrust_command(HOVER, ZERO_REF, 0.0, no_aero) == G


def test_thrust_horizontal(no_aero):
    s = VehicleState(1.0, 0.0, 0.0, 0.0)
    ref = ReferenceSample(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    assert thrust_command(s, ref, 1.0, no_aero) == 0.0


def test_thrust_speed_error_linear(no_aero):
    s = VehicleState(0.5, 0.0, math.pi / 2, 0.0)
    assert thrust_command(s, ZERO_REF, 0.0, no_aero) == pytest.approx(G - 0.5)


def test_torque_feedforward_only():
    s = VehicleState(0, 0, 0.4, 0.2)
    assert torque_command(s, 0.4, 0.2, 0.1) == pytest.approx(0.1)


def test_torque_pitch_error():
    s = VehicleState(0, 0, 0.6, 0.0)
    assert torque_command(s, 0.5, 0.0, 0.0) == pytest.approx(-0.5)


def test_torque_zero():
    assert torque_command(HOVER, math.pi / 2, 0.0, 0.0) == 0.0


def test_allocate_symmetric_hover():
    assert allocate(G, 0.0) == (G / 2, G / 2, 0.0)


def test_allocate_differential():
    assert allocate(1.0, 0.2) == pytest.approx((0.6, 0.4, 0.0))


def test_allocate_ailerons_only():
    assert allocate(3.0, 0.7, AllocationConfig(beta=0.0)) == (1.5, 1.5, 0.7)


def test_allocate_clamps_differential():
    T1, T2, share = allocate(2.0, 1.0, AllocationConfig(beta=1.0, d_max=0.4))
    assert T1 - T2 == pytest.approx(0.4)
    assert share == pytest.approx(0.6)


@given(T=st.floats(-50, 50), tau=st.floats(-50, 50), beta=st.floats(0, 1), d_max=st.floats(0, 100))
def test_allocate_conserves_thrust(T, tau, beta, d_max):
    T1, T2, _ = allocate(T, tau, AllocationConfig(beta, d_max))
    assert abs(T1 + T2 - T) <= 1e-15 * max(1.0, abs(T))


def test_gains_reject_sigma2_above_one():
    with pytest.raises(ValueError):
        ControllerGains(sigma2=SaturationFn(0.9, 1.5))


def test_controller_hover_fixed_point(no_aero):
    c = Controller(no_aero)
    ci = c(HOVER, ZERO_REF)
    assert (ci.T, ci.tau, ci.eps, ci.T1, ci.T2) == (G, 0.0, 0.0, G / 2, G / 2)


def test_controller_clamps_negative_thrust(no_aero):
    c = Controller(no_aero, clamp_thrust=True)
    ref = ReferenceSample(0.0, -20.0, 0, 0, 0, 0)
    ci = c(HOVER, ref)
    assert ci.T == 0.0 and ci.thrust_clamped
    ci = Controller(no_aero)(HOVER, ref)
    assert ci.T < 0 and not ci.thrust_clamped
