import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tailsitter.aero import (AeroModel, AnalyticPolar, PolarError, PolarRangeError, PolarTable, aero_forces,
                             coefficients, default_polar, load_polar_csv, naca0020_like_rows, optimal_aoa,
                             parse_polar_csv)

from conftest import ConstantPolar

SMALL = PolarTable.from_rows([(0, 0.0, 0.01), (10, 1.0, 0.05)])


def brute_force_optimum_deg(provider, lo_deg, hi_deg, step_deg):
    grid = np.arange(int(round((hi_deg - lo_deg) / step_deg)) + 1) * step_deg + lo_deg
    ratios = np.array([np.divide(*provider.coefficients(np.radians(a))) for a in grid])
    return grid[int(np.argmax(ratios))]


def test_analytic_zero_aoa():
    p = AnalyticPolar()
    assert coefficients(p, 0.0) == (0.0, p.cd0)


def test_analytic_lift_peak_at_45():
    p = AnalyticPolar()
    cl45, _ = p.coefficients(math.radians(45))
    assert cl45 == pytest.approx(p.c1)
    for a in (30, 40, 44, 46, 50, 60):
        assert p.coefficients(math.radians(a))[0] < cl45


def test_table_midpoint():
    cl, cd = SMALL.coefficients(math.radians(5))
    assert cl == pytest.approx(0.5)
    assert cd == pytest.approx(0.03)


def test_table_exact_sample():
    t = default_polar()
    for a, cl, cd in t.rows()[::97]:
        assert t.coefficients_deg(a) == (cl, cd)


def test_table_out_of_range_names_bounds():
    with pytest.raises(PolarRangeError, match=r"\[0, 10\]"):
        SMALL.coefficients(math.radians(12))


@pytest.mark.parametrize("rows, msg", [
    ([(0, 0, 0.01)], "at least 2"),
    ([(0, 0, 0.01), (0, 0.1, 0.02)], "duplicate"),
    ([(5, 0, 0.01), (0, 0.1, 0.02)], "unsorted"),
    ([(0, 0, 0.0), (1, 0.1, 0.02)], "cd must be > 0"),
])
def test_table_validation(rows, msg):
    with pytest.raises(PolarError, match=msg):
        PolarTable.from_rows(rows)


def test_forces_arithmetic():
    aero = AeroModel.from_K(0.5, ConstantPolar(1.0, 0.1))
    L, D = aero_forces(aero, 2.0, 0.1)
    assert (L, D) == pytest.approx((2.0, 0.2))


def test_forces_zero_airspeed():
    assert aero_forces(AeroModel(1.2, 1.0), 0.0, 0.3) == (0.0, 0.0)


def test_forces_below_floor():
    assert aero_forces(AeroModel(1.2, 1.0), 0.04, 0.3, airspeed_floor=0.05) == (0.0, 0.0)


def test_forces_reject_negative_airspeed():
    with pytest.raises(ValueError):
        aero_forces(AeroModel(1.2, 1.0), -1.0, 0.0)


def test_K_is_half_rho_S():
    m = AeroModel(1.225, 0.6)
    assert m.K == 1.225 * 0.6 / 2


@given(V=st.floats(0.01, 50), alpha=st.floats(-3, 3), k=st.floats(0.1, 10), scale=st.floats(0.1, 10))
def test_forces_homogeneity(V, alpha, k, scale):
    base = AeroModel(1.0, 2 * k, AnalyticPolar())
    L, D = base.forces(V, alpha)
    L2, D2 = base.forces(V * scale, alpha)
    assert L2 == pytest.approx(L * scale ** 2, rel=1e-9, abs=1e-12)
    assert D2 == pytest.approx(D * scale ** 2, rel=1e-9)
    L3, D3 = AeroModel(1.0, 2 * k * scale, AnalyticPolar()).forces(V, alpha)
    assert L3 == pytest.approx(L * scale, rel=1e-9, abs=1e-12)
    assert D3 == pytest.approx(D * scale, rel=1e-9)


def test_doubling_speed_quadruples_forces():
    m = AeroModel(1.225, 0.5, AnalyticPolar())
    L1, D1 = m.forces(3.0, 0.2)
    L2, D2 = m.forces(6.0, 0.2)
    assert (L2 / L1, D2 / D1) == pytest.approx((4.0, 4.0))


@given(a=st.floats(-180, 179.9))
def test_interpolation_is_continuous(a):
    t = default_polar()
    c0 = np.array(t.coefficients_deg(a))
    c1 = np.array(t.coefficients_deg(a + 1e-6))
    assert np.all(np.abs(c1 - c0) < 1e-5)


def test_default_polar_optimum_is_six_degrees():
    a = optimal_aoa(default_polar(), (math.radians(-10), math.radians(30)))
    assert math.degrees(a) == pytest.approx(6.0, abs=0.01)
    assert brute_force_optimum_deg(default_polar(), 0, 20, 0.001) == pytest.approx(6.0, abs=1e-9)


def test_analytic_optimum_matches_closed_form_and_finer_sweep():
    p = AnalyticPolar(c1=0.8, cd0=0.02, cd90=1.0)
    got = math.degrees(optimal_aoa(p, (0.0, math.radians(30))))
    # tan^2(alpha*) = cd0 / (cd0 + cd90)
    assert got == pytest.approx(7.971184302814320, abs=0.01)
    assert got == pytest.approx(brute_force_optimum_deg(p, 0, 30, 0.001), abs=0.01)


def test_optimum_flat_ratio_prefers_smallest_angle():
    t = PolarTable.from_rows([(-5, -0.05, 0.01), (0, 0.1, 0.02), (10, 0.3, 0.06)])
    got = optimal_aoa(t, (0.0, math.radians(10)))
    assert got == 0.0


def test_optimum_refinement_stable():
    p = AnalyticPolar(0.9, 0.015, 1.3)
    for step in (0.1, 0.01):
        coarse = optimal_aoa(p, (0.0, math.radians(30)), step)
        fine = optimal_aoa(p, (0.0, math.radians(30)), step / 10)
        assert abs(math.degrees(coarse - fine)) <= step


@pytest.mark.parametrize("rng", [(0.2, 0.2), (0.3, 0.1), (math.nan, 1.0)])
def test_optimum_degenerate_range(rng):
    with pytest.raises(ValueError):
        optimal_aoa(AnalyticPolar(), rng)


def test_csv_round_trip(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text(default_polar().to_csv(), encoding="utf-8")
    again = load_polar_csv(path)
    assert again == default_polar()
    assert again.metadata["airfoil"].startswith("NACA-0020")


def test_shipped_table_matches_generator():
    assert default_polar().rows() == naca0020_like_rows()


def test_shipped_table_coverage():
    t = default_polar()
    assert t.covers(-10, 90)
    assert t.bounds_deg == (-180.0, 180.0)


def test_shipped_table_symmetric():
    t = default_polar()
    for a in (1.0, 6.0, 15.5, 90.0, 170.25):
        cl_p, cd_p = t.coefficients_deg(a)
        cl_n, cd_n = t.coefficients_deg(-a)
        assert cl_n == -cl_p and cd_n == cd_p


@pytest.mark.parametrize("text, msg", [
    ("alpha,cl,cd\n0,0,0.1\n1,0,0.1\n", "expected header"),
    ("alpha_deg,cl,cd\n0,0,0.1\n1,x,0.1\n", ":3: non-numeric"),
    ("alpha_deg,cl,cd\n0,0,0.1\n1,0\n", ":3: expected 3 columns"),
    ("alpha_deg,cl,cd\n1,0,0.1\n0,0,0.1\n", "unsorted"),
    ("alpha_deg,cl,cd\n0,0,0.1\n0,0,0.1\n", "duplicate"),
    ("# just a comment\n", "missing header"),
])
def test_csv_rejects(text, msg):
    with pytest.raises(PolarError, match=msg):
        parse_polar_csv(text)
